#pragma once

#include <cstdint>
#include <string>

#include "corrviz/stats.hpp"

namespace corrviz::examples {

enum class Kind {
    three_point_demo,
    uncorrelated,
    sum_constrained,
    single_component,
    two_disjoint,
    three_overlapping,
};

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

struct ExampleSpec {
    Kind kind = Kind::three_point_demo;
    std::size_t n_points = 3;
    std::uint64_t seed = 1;
};

/// Deterministic illustrative datasets: a 3-point dataset whose closer model
/// has the worse goodness of fit, plus five covariance structures
/// (uncorrelated, sum-constrained, single component, two disjoint components,
/// three overlapping components).
stats::DataSet generate(const ExampleSpec& spec);

}  // namespace corrviz::examples
