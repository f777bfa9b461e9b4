#include "ltp/sweep.hpp"

#include "ltp/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

namespace ltp {

namespace {

void validate_axis(const SweepAxis& axis, const ParameterSet& params) {
    if (axis.values.empty()) throw UsageError("sweep axis '" + axis.name + "' has no values");
    if (!params.contains(axis.name)) throw UsageError("unknown parameter '" + axis.name + "'");
    if (axis.values.size() < 2) return;
    const bool increasing = axis.values[1] > axis.values[0];
    for (std::size_t i = 1; i < axis.values.size(); ++i) {
        const double d = axis.values[i] - axis.values[i - 1];
        if (!(increasing ? d > 0.0 : d < 0.0)) {
            throw UsageError("sweep axis '" + axis.name + "' is not strictly monotone");
        }
    }
}

struct CellOutcome {
    SweepCell cell;
    std::optional<SpectralVector> X;
};

CellOutcome solve_cell(const ModelBuilder& builder, const SweepSpec& spec, double p1, double p2,
                       const std::optional<SpectralVector>& start) {
    CellOutcome out;
    out.cell.param1 = p1;
    out.cell.param2 = p2;
    out.cell.re_weakest = std::numeric_limits<double>::quiet_NaN();
    out.cell.im_weakest = std::numeric_limits<double>::quiet_NaN();

    ParameterSet params = spec.base_params;
    params.set(spec.axis1.name, p1);
    params.set(spec.axis2.name, p2);

    auto attempt = [&](const std::optional<SpectralVector>& x0) {
        const SystemModel model = builder(params);
        const SolverResult r = solve_pss(model, spec.solver, x0);
        const Complex w = analyze_modes(r.hss).weakest;
        out.cell.re_weakest = w.real();
        out.cell.im_weakest = w.imag();
        out.cell.converged = true;
        out.cell.iterations = r.iterations;
        out.cell.error.clear();
        out.X = r.X;
    };
    try {
        attempt(start);
        return out;
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        out.cell.error = e.what();
    }
    if (start) {
        try {
            attempt(std::nullopt);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            out.cell.error = e.what();
        }
    }
    return out;
}

}  // namespace

void SweepSpec::validate() const {
    validate_axis(axis1, base_params);
    validate_axis(axis2, base_params);
    if (axis1.name == axis2.name) throw UsageError("sweep axes must name different parameters");
    if (workers < 1) throw UsageError("workers must be >= 1");
    solver.validate();
}

int SweepResult::converged_count() const {
    int c = 0;
    for (const auto& cell : cells) c += cell.converged ? 1 : 0;
    return c;
}

SweepResult run_sweep(const ModelBuilder& builder, const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.rows = static_cast<int>(spec.axis1.values.size());
    result.cols = static_cast<int>(spec.axis2.values.size());
    result.cells.resize(static_cast<std::size_t>(result.rows * result.cols));

    std::atomic<int> next_row{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(result.rows));
    auto worker = [&] {
        for (int i = next_row++; i < result.rows; i = next_row++) {
            try {
                std::optional<SpectralVector> warm;
                for (int j = 0; j < result.cols; ++j) {
                    CellOutcome o = solve_cell(builder, spec, spec.axis1.values[static_cast<std::size_t>(i)],
                                               spec.axis2.values[static_cast<std::size_t>(j)], warm);
                    if (o.cell.converged) warm = std::move(o.X);
                    result.cells[static_cast<std::size_t>(i * result.cols + j)] = std::move(o.cell);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int n_threads = std::min(spec.workers, result.rows);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    result.region.assign(static_cast<std::size_t>(result.rows), std::vector<bool>(static_cast<std::size_t>(result.cols)));
    for (int i = 0; i < result.rows; ++i) {
        for (int j = 0; j < result.cols; ++j) {
            const SweepCell& c = result.cell(i, j);
            result.region[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c.converged && c.re_weakest > 0.0;
        }
    }
    return result;
}

Region extract_region(const SweepResult& result) {
    if (result.converged_count() == 0) throw UsageError("extract_region: no converged cell");
    Region region;
    region.unstable.assign(static_cast<std::size_t>(result.rows), std::vector<bool>(static_cast<std::size_t>(result.cols)));
    for (int i = 0; i < result.rows; ++i) {
        for (int j = 0; j < result.cols; ++j) {
            const SweepCell& c = result.cell(i, j);
            region.unstable[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c.converged && c.re_weakest > 0.0;
        }
    }

    // Crossing on the edge a -> b, if the sign of re_weakest changes there.
    auto crossing = [](const SweepCell& a, const SweepCell& b) -> std::optional<BoundaryPoint> {
        if (!a.converged || !b.converged) return std::nullopt;
        if ((a.re_weakest > 0.0) == (b.re_weakest > 0.0)) return std::nullopt;
        const double s = a.re_weakest / (a.re_weakest - b.re_weakest);
        return BoundaryPoint{a.param1 + s * (b.param1 - a.param1), a.param2 + s * (b.param2 - a.param2)};
    };

    if (result.rows == 1 || result.cols == 1) {
        // Degenerate grid: each crossing is a point of the boundary.
        const int len = std::max(result.rows, result.cols);
        for (int k = 0; k + 1 < len; ++k) {
            const SweepCell& a = result.rows == 1 ? result.cell(0, k) : result.cell(k, 0);
            const SweepCell& b = result.rows == 1 ? result.cell(0, k + 1) : result.cell(k + 1, 0);
            if (auto p = crossing(a, b)) region.segments.push_back({*p});
        }
        return region;
    }

    for (int i = 0; i + 1 < result.rows; ++i) {
        for (int j = 0; j + 1 < result.cols; ++j) {
            const SweepCell& c00 = result.cell(i, j);
            const SweepCell& c01 = result.cell(i, j + 1);
            const SweepCell& c11 = result.cell(i + 1, j + 1);
            const SweepCell& c10 = result.cell(i + 1, j);
            std::vector<BoundaryPoint> pts;
            for (const auto& p : {crossing(c00, c01), crossing(c01, c11), crossing(c11, c10), crossing(c10, c00)}) {
                if (p) pts.push_back(*p);
            }
            if (pts.size() == 2 || pts.size() == 3) {
                region.segments.push_back({pts[0], pts[1]});
            } else if (pts.size() == 4) {
                region.segments.push_back({pts[0], pts[1]});
                region.segments.push_back({pts[2], pts[3]});
            }
        }
    }
    return region;
}

void write_trait_csv(std::ostream& os, const SweepResult& result) {
    os << "param1,param2,re_weakest,im_weakest,converged,iterations\n";
    for (const auto& c : result.cells) {
        csv::field(os, c.param1);
        csv::field(os, c.param2);
        csv::field(os, c.re_weakest);
        csv::field(os, c.im_weakest);
        os << (c.converged ? "true" : "false") << ',' << c.iterations << '\n';
    }
}

void write_region_csv(std::ostream& os, const SweepResult& result, const Region& region) {
    os << "param1,param2,unstable,converged\n";
    for (int i = 0; i < result.rows; ++i) {
        for (int j = 0; j < result.cols; ++j) {
            const SweepCell& c = result.cell(i, j);
            csv::field(os, c.param1);
            csv::field(os, c.param2);
            os << (region.unstable[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ? "true" : "false") << ','
               << (c.converged ? "true" : "false") << '\n';
        }
    }
}

void write_boundary_csv(std::ostream& os, const Region& region) {
    os << "segment,param1,param2\n";
    for (std::size_t s = 0; s < region.segments.size(); ++s) {
        for (const auto& p : region.segments[s]) {
            os << s << ',';
            csv::field(os, p.param1);
            os << csv::number(p.param2) << '\n';
        }
    }
}

}  // namespace ltp
