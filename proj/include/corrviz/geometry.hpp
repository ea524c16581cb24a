#pragma once

#include <array>
#include <vector>

#include "corrviz/stats.hpp"

namespace corrviz::geometry {

using stats::CorrelationDecomposition;
using stats::DataSet;
using stats::ReducedCovariance;
using stats::SymMatrix;

class ZeroModelValue : public std::runtime_error {
public:
    explicit ZeroModelValue(const std::string& what) : std::runtime_error(what) {}
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Two segments between the error bars of points i and j, attached at
/// relative height |rho|. Positive rho attaches on matching sides, negative
/// rho on opposite sides (the segments cross), rho = 0 collapses both onto
/// the direct connector.
struct CorrelationLinePair {
    std::size_t i = 0, j = 0;
    std::array<Point2, 2> segment_a;  // upper attachment at i
    std::array<Point2, 2> segment_b;  // lower attachment at i
    double rho = 0.0;
};

enum class Side { above, below };
enum class HatchClass { component_positive, component_negative };

/// Annular band between two successive cumulative marginal errors of one
/// point, carrying the sign of the eigenvector element that produced it.
struct HatchBand {
    std::size_t point = 0;
    Side side = Side::above;
    double inner_edge = 0.0;  // y-coordinate
    double outer_edge = 0.0;  // y-coordinate
    HatchClass hatch_class = HatchClass::component_positive;
    std::size_t component = 0;
    bool degenerate = false;
};

struct TriangleMarker {
    std::size_t point = 0;
    double apex_above = 0.0;
    double apex_below = 0.0;
};

enum class CellSign { positive, negative, zero };

/// One Hinton cell: symbol area proportional to |c_ij|, sign as fill class.
struct HintonCell {
    std::size_t i = 0, j = 0;
    Point2 center;            // cell coordinates, (col + 0.5, row + 0.5)
    double radius_fraction = 0.0;  // of the half cell width
    CellSign sign = CellSign::zero;
};

enum class EllipseStyle { full_marginal, remaining, conditional_slice };

/// Locus of squared M-distance 1 for a 2x2 covariance, centered at the origin
/// of the (dy_i, dy_j) plane.
struct EllipseSpec {
    std::size_t i = 0, j = 0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle = 0.0;  // radians, in [-pi/2, pi/2)
    EllipseStyle style = EllipseStyle::full_marginal;
    bool degenerate = false;
};

struct PairEllipses {
    std::size_t i = 0, j = 0;
    EllipseSpec full_marginal;
    EllipseSpec remaining;
    EllipseSpec conditional_slice;
};

CorrelationLinePair correlation_line_endpoints(double xi, double yi, double sigma_i,
                                               double xj, double yj, double sigma_j,
                                               double rho);

/// Per point, per side, one band per kept component, built by adding the kept
/// components back onto K from smallest to largest eigenvalue. Bands narrower
/// than 1e-12 * sigma_i are flagged degenerate.
std::vector<HatchBand> hatch_bands(const std::vector<double>& y,
                                   const std::vector<double>& sigmas_full,
                                   const CorrelationDecomposition& decomp,
                                   const ReducedCovariance& reduced);

std::vector<TriangleMarker> conditional_markers(const std::vector<double>& y,
                                                const std::vector<double>& sigma_cond);

std::vector<HintonCell> hinton_cells(const SymMatrix& c);

EllipseSpec ellipse_from_cov2(const SymMatrix& cov2, EllipseStyle style);

std::vector<PairEllipses> pairwise_ellipse_grid(const DataSet& dataset,
                                                const CorrelationDecomposition& decomp,
                                                const ReducedCovariance& reduced);

/// Divides data, covariance, and every model by the selected model's values;
/// the reference model maps to the constant line 1 and squared M-distances
/// are preserved.
DataSet ratio_view(const DataSet& dataset, std::size_t model_index);

}  // namespace corrviz::geometry
