#include <cstring>
#include <iostream>

#include "rflow/verify.hpp"

int main(int argc, char** argv) {
    rflow::VerifyOptions opts;
    opts.level = rflow::VerifyLevel::full;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opts.level = rflow::VerifyLevel::quick;
    }
    const auto results = rflow::run_acceptance(opts);
    return rflow::report(results, std::cout);
}
