#include "minsess/generate.hpp"

#include "CLI11.hpp"

#include <iostream>

// Prints a random well-typed program for the given seed.
int main(int argc, char** argv) {
    std::uint64_t seed = 1;
    minsess::ProgramShape shape;
    bool first_order = false;
    CLI::App app{"Random fixture generator"};
    app.add_option("--seed", seed);
    app.add_option("--sessions", shape.sessions)->check(CLI::PositiveNumber);
    app.add_option("--prefixes", shape.max_prefixes)->check(CLI::PositiveNumber);
    app.add_flag("--first-order", first_order);
    CLI11_PARSE(app, argc, argv);
    shape.higher_order = !first_order;
    minsess::Rng rng(seed);
    std::cout << "-- Random program, seed " << seed << ".\n" << minsess::print_file(minsess::random_program(rng, shape));
    return 0;
}
