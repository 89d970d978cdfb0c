/// Writes a uniform random k-SAT instance in DIMACS form to stdout.
#include <iostream>

#include <CLI11.hpp>

#include "splitwalk/targets/sat.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Random k-SAT instance generator"};
    int n = 12;
    std::size_t m = 40;
    int k = 3;
    std::uint64_t seed = 1;
    app.add_option("-n,--vars", n, "Variables")->check(CLI::PositiveNumber);
    app.add_option("-m,--clauses", m, "Clauses");
    app.add_option("-k", k, "Literals per clause")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Instance seed");
    CLI11_PARSE(app, argc, argv);

    splitwalk::RngStream rng(seed, 0);
    try {
        std::cout << splitwalk::to_dimacs(splitwalk::random_ksat(n, m, k, rng));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
