#pragma once

#include "ltp/model.hpp"
#include "ltp/pss_solver.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ltp {

struct SweepAxis {
    std::string name;
    std::string unit;
    std::vector<double> values;  ///< strictly monotone
};

/// Builds the closed-loop model for one parameter point.
using ModelBuilder = std::function<SystemModel(const ParameterSet&)>;

struct SweepSpec {
    SweepAxis axis1;  ///< rows
    SweepAxis axis2;  ///< columns; the warm-start chain runs along a row
    ParameterSet base_params;
    SolverConfig solver;
    int workers = 1;

    void validate() const;
};

struct SweepCell {
    double param1 = 0.0;
    double param2 = 0.0;
    double re_weakest = 0.0;  ///< NaN when not converged
    double im_weakest = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string error;  ///< failure reason of a non-converged cell
};

struct SweepResult {
    int rows = 0;
    int cols = 0;
    std::vector<SweepCell> cells;  ///< row-major
    std::vector<std::vector<bool>> region;  ///< true = unstable; false for non-converged cells

    [[nodiscard]] const SweepCell& cell(int i, int j) const { return cells[static_cast<std::size_t>(i * cols + j)]; }
    [[nodiscard]] int converged_count() const;
};

/// Solves every grid point. A cell warm-starts from the nearest converged cell
/// to its left in the same row (cold start if none, or if the warm solve fails).
/// Rows are distributed over `workers` threads; results do not depend on scheduling.
SweepResult run_sweep(const ModelBuilder& builder, const SweepSpec& spec);

struct BoundaryPoint {
    double param1 = 0.0;
    double param2 = 0.0;
};

/// Region grid plus the zero level set of re_weakest as line segments
/// (marching squares, linear interpolation along cell edges).
struct Region {
    std::vector<std::vector<bool>> unstable;
    std::vector<std::vector<BoundaryPoint>> segments;
};

/// Throws UsageError when no cell converged.
Region extract_region(const SweepResult& result);

void write_trait_csv(std::ostream& os, const SweepResult& result);
void write_region_csv(std::ostream& os, const SweepResult& result, const Region& region);
void write_boundary_csv(std::ostream& os, const Region& region);

}  // namespace ltp
