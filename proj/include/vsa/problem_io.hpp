// Built-in example registry and the line-based problem-file format.
#pragma once

#include "vsa/collocation.hpp"

#include <stdexcept>
#include <string>

namespace vsa {

struct LoadError : std::runtime_error {
    LoadError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
    explicit LoadError(const std::string& msg) : std::runtime_error(msg), line(0) {}
    int line;
};

// The five reference problems (1..5). Unknown ids are rejected.
ProblemSpec builtin_example(int id);

// Parses and validates a problem file; throws LoadError naming the line.
ProblemSpec load_problem(const std::string& path);
ProblemSpec parse_problem_text(const std::string& text);

std::string serialize_problem(const ProblemSpec& p);

// Structural equality (interval, center, point, weight, and expression trees).
bool problems_equal(const ProblemSpec& x, const ProblemSpec& y);

}  // namespace vsa
