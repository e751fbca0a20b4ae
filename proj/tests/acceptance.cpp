// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any gated failure.
// Usage: acceptance [--fast] [--no-stretch]

#include <cstring>
#include <iostream>

#include "plp/verify.hpp"

int main(int argc, char** argv) {
    plp::VerifyOptions opt;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--fast")) opt.fast = true;
        else if (!std::strcmp(argv[i], "--no-stretch")) opt.stretch = false;
        else {
            std::cerr << "unknown argument " << argv[i] << '\n';
            return 1;
        }
    }
    opt.on_result = [](const plp::CheckResult& c) { std::cout << c.line() << std::endl; };
    const auto rep = plp::run_acceptance(plp::embedded_data(), opt);
    std::cout << (rep.passed() ? "acceptance passed" : "acceptance FAILED") << std::endl;
    return rep.passed() ? 0 : 1;
}
