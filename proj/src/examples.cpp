#include "corrviz/examples.hpp"

#include <cmath>
#include <random>

namespace corrviz::examples {

using stats::DataSet;
using stats::SymMatrix;

std::string to_string(Kind k) {
    switch (k) {
        case Kind::three_point_demo: return "three_point_demo";
        case Kind::uncorrelated: return "uncorrelated";
        case Kind::sum_constrained: return "sum_constrained";
        case Kind::single_component: return "single_component";
        case Kind::two_disjoint: return "two_disjoint";
        case Kind::three_overlapping: return "three_overlapping";
    }
    return "three_point_demo";
}

Kind kind_from_string(const std::string& s) {
    if (s == "three_point_demo") return Kind::three_point_demo;
    if (s == "uncorrelated") return Kind::uncorrelated;
    if (s == "sum_constrained") return Kind::sum_constrained;
    if (s == "single_component") return Kind::single_component;
    if (s == "two_disjoint") return Kind::two_disjoint;
    if (s == "three_overlapping") return Kind::three_overlapping;
    throw std::invalid_argument("unknown example kind: " + s);
}

namespace {

// mt19937_64 raw draws only; the distribution shaping is done by hand so the
// output is identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        return static_cast<double>(gen_()) / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    }

    double gauss() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 gen_;
};

std::vector<double> positions(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
    return x;
}

// smooth central curve plus a small seeded perturbation
std::vector<double> central_values(std::size_t n, Rng& rng) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
        y[i] = 1.0 + 0.3 * std::sin(2.2 * t + 0.4) + 0.04 * rng.gauss();
    }
    return y;
}

std::vector<double> bump(std::size_t n, double center, double width) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (static_cast<double>(i) - center) / width;
        v[i] = std::exp(-d * d);
    }
    return v;
}

SymMatrix rank_terms_plus_eps(std::size_t n, const std::vector<std::vector<double>>& profiles,
                              const std::vector<double>& lambdas, double eps) {
    SymMatrix v(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = (i == j) ? eps : 0.0;
            for (std::size_t k = 0; k < profiles.size(); ++k) {
                s += lambdas[k] * profiles[k][i] * profiles[k][j];
            }
            v.set(i, j, s);
        }
    }
    return v;
}

DataSet three_point_demo() {
    DataSet d{{1.0, 2.0, 3.0}, {1.0, 1.15, 1.05}, SymMatrix(3), {}, "x", "y"};
    const std::vector<double> sigma{0.35, 0.3, 0.3};
    const double corr[3][3] = {{1.0, 0.3, 0.3}, {0.3, 1.0, 0.9}, {0.3, 0.9, 1.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i; j < 3; ++j) {
            d.cov.set(i, j, corr[i][j] * sigma[i] * sigma[j]);
        }
    }
    // M1 sits below the data on the same side everywhere; M2 is closer to
    // every point but lands on opposite sides of the strongly correlated pair
    d.models.push_back({"M1", {d.y[0] - 0.30, d.y[1] - 0.27, d.y[2] - 0.27}});
    d.models.push_back({"M2", {d.y[0] - 0.15, d.y[1] - 0.15, d.y[2] + 0.15}});
    return d;
}

}  // namespace

DataSet generate(const ExampleSpec& spec) {
    std::size_t min_points = 3;
    if (spec.kind == Kind::two_disjoint) min_points = 4;
    if (spec.kind == Kind::three_overlapping) min_points = 6;
    if (spec.n_points < min_points) {
        throw std::invalid_argument("generate: " + to_string(spec.kind) + " needs at least " +
                                    std::to_string(min_points) + " points");
    }

    if (spec.kind == Kind::three_point_demo) return three_point_demo();

    const std::size_t n = spec.n_points;
    Rng rng(spec.seed);
    DataSet d{positions(n), central_values(n, rng), SymMatrix(n), {}, "x", "y"};
    const double nd = static_cast<double>(n);

    switch (spec.kind) {
        case Kind::uncorrelated: {
            for (std::size_t i = 0; i < n; ++i) {
                const double s = 0.12 + 0.05 * (0.5 + 0.5 * std::sin(1.7 * static_cast<double>(i)));
                d.cov.set(i, i, s * s);
            }
            break;
        }
        case Kind::sum_constrained: {
            const double s2 = 0.04;  // sigma = 0.2
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    double v = -s2 / nd;
                    if (i == j) v += s2 + 1e-6 * s2;
                    d.cov.set(i, j, v);
                }
            }
            break;
        }
        case Kind::single_component: {
            const auto v = bump(n, 0.5 * (nd - 1.0), nd / 3.0);
            const double lam = 0.04;
            d.cov = rank_terms_plus_eps(n, {v}, {lam}, 1e-6 * lam);
            break;
        }
        case Kind::two_disjoint: {
            const std::size_t h = n / 2;
            std::vector<double> v1(n, 0.0), v2(n, 0.0);
            const auto b1 = bump(n, 0.5 * (static_cast<double>(h) - 1.0), nd / 5.0);
            const auto b2 = bump(n, 0.5 * (static_cast<double>(h) + nd - 1.0), nd / 5.0);
            for (std::size_t i = 0; i < h; ++i) v1[i] = b1[i];
            for (std::size_t i = h; i < n; ++i) v2[i] = b2[i];
            d.cov = rank_terms_plus_eps(n, {v1, v2}, {0.04, 0.03}, 1e-6 * 0.04);
            break;
        }
        case Kind::three_overlapping: {
            const auto v1 = bump(n, nd / 6.0, nd / 4.0);
            const auto v2 = bump(n, nd / 2.0, nd / 4.0);
            const auto v3 = bump(n, 5.0 * nd / 6.0, nd / 4.0);
            d.cov = rank_terms_plus_eps(n, {v1, v2, v3}, {0.04, 0.035, 0.03}, 1e-6 * 0.04);
            break;
        }
        case Kind::three_point_demo:
            break;  // handled above
    }
    return d;
}

}  // namespace corrviz::examples
