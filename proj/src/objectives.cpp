#include "dsm/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace dsm {
namespace {

void check_dim(int expected, const Vec& x, const char* what) {
    if (static_cast<int>(x.size()) != expected)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// True when the segment between two slope vectors passes through the origin,
// i.e. they are collinear and point in opposite directions. Exact arithmetic
// on the stored doubles, so the selection is deterministic.
bool segment_contains_origin(const Vec& a, const Vec& b) {
    for (std::size_t c = 0; c < a.size(); ++c)
        for (std::size_t d = c + 1; d < a.size(); ++d)
            if (a[c] * b[d] != a[d] * b[c]) return false;
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        ab += a[c] * b[c];
        aa += a[c] * a[c];
        bb += b[c] * b[c];
    }
    if (aa == 0.0 || bb == 0.0) return true;
    return ab <= 0.0;
}

struct Interval {
    double lo = 0.0, hi = 0.0;
};

double dist_to_box(const Vec& y, const std::vector<Interval>& box) {
    double s = 0.0;
    for (std::size_t c = 0; c < y.size(); ++c) {
        double gap = 0.0;
        if (y[c] < box[c].lo) gap = box[c].lo - y[c];
        else if (y[c] > box[c].hi) gap = y[c] - box[c].hi;
        s += gap * gap;
    }
    return std::sqrt(s);
}

// Converts an objective to one-dimensional pieces when possible.
std::optional<std::vector<AffinePiece>> pieces_1d(const ConvexObjective& obj) {
    if (obj.dimension != 1) return std::nullopt;
    if (!obj.pieces.empty()) return obj.pieces;
    if (obj.l1_shift) {
        double s = (*obj.l1_shift)[0];
        return std::vector<AffinePiece>{{{1.0}, -s}, {{-1.0}, s}};
    }
    return std::nullopt;
}

// Optimum oracle for suites of shifted-l1 objectives: the optimal set is the
// box of per-component median intervals of the shifts.
std::optional<OptimumInfo> l1_box_optimum(const std::vector<ConvexObjective>& objs) {
    int m = objs.front().dimension;
    int n = static_cast<int>(objs.size());
    for (const auto& o : objs)
        if (!o.l1_shift) return std::nullopt;
    std::vector<Interval> box(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        std::vector<double> s(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = (*objs[static_cast<std::size_t>(i)].l1_shift)[static_cast<std::size_t>(c)];
        std::sort(s.begin(), s.end());
        if (n % 2 == 1) {
            box[static_cast<std::size_t>(c)] = {s[static_cast<std::size_t>(n / 2)], s[static_cast<std::size_t>(n / 2)]};
        } else {
            box[static_cast<std::size_t>(c)] = {s[static_cast<std::size_t>(n / 2 - 1)], s[static_cast<std::size_t>(n / 2)]};
        }
    }
    Vec anchor(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) anchor[static_cast<std::size_t>(c)] = box[static_cast<std::size_t>(c)].lo;
    double fstar = 0.0;
    for (const auto& o : objs) fstar += o.value(anchor);
    OptimumInfo info;
    info.f_star = fstar;
    info.distance = [box](const Vec& y) { return dist_to_box(y, box); };
    return info;
}

// Optimum oracle for one-dimensional piecewise-linear suites: the sum is
// piecewise linear, so its minimum sits on the grid of pairwise piece
// intersections. Returns nothing when the sum is unbounded below.
std::optional<OptimumInfo> scan_1d_optimum(const std::vector<ConvexObjective>& objs) {
    std::vector<std::vector<AffinePiece>> all;
    for (const auto& o : objs) {
        auto p = pieces_1d(o);
        if (!p) return std::nullopt;
        all.push_back(std::move(*p));
    }
    std::vector<double> candidates;
    for (const auto& pieces : all)
        for (std::size_t p = 0; p < pieces.size(); ++p)
            for (std::size_t q = p + 1; q < pieces.size(); ++q) {
                double da = pieces[p].slope[0] - pieces[q].slope[0];
                if (da != 0.0)
                    candidates.push_back((pieces[q].intercept - pieces[p].intercept) / da);
            }
    auto eval = [&all](double x) {
        double s = 0.0;
        for (const auto& pieces : all) {
            double best = pieces[0].slope[0] * x + pieces[0].intercept;
            for (std::size_t p = 1; p < pieces.size(); ++p)
                best = std::max(best, pieces[p].slope[0] * x + pieces[p].intercept);
            s += best;
        }
        return s;
    };
    auto slope_at = [&all](double x) {
        double s = 0.0;
        for (const auto& pieces : all) {
            double best = pieces[0].slope[0] * x + pieces[0].intercept;
            double slope = pieces[0].slope[0];
            for (std::size_t p = 1; p < pieces.size(); ++p) {
                double v = pieces[p].slope[0] * x + pieces[p].intercept;
                if (v > best) {
                    best = v;
                    slope = pieces[p].slope[0];
                }
            }
            s += slope;
        }
        return s;
    };
    if (candidates.empty()) {
        if (slope_at(0.0) != 0.0) return std::nullopt;
        OptimumInfo info;
        info.f_star = eval(0.0);
        info.distance = [](const Vec&) { return 0.0; };
        return info;
    }
    std::sort(candidates.begin(), candidates.end());
    double left = slope_at(candidates.front() - 1.0);
    double right = slope_at(candidates.back() + 1.0);
    if (left > 0.0 || right < 0.0) return std::nullopt;
    double fmin = eval(candidates[0]);
    for (double x : candidates) fmin = std::min(fmin, eval(x));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : candidates)
        if (eval(x) <= fmin + 1e-12) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    // A zero edge slope means the sum is constant on that whole ray; when the
    // constant matches the minimum the minimizer set is unbounded that way.
    if (left == 0.0 && eval(candidates.front()) <= fmin + 1e-12)
        lo = -std::numeric_limits<double>::infinity();
    if (right == 0.0 && eval(candidates.back()) <= fmin + 1e-12)
        hi = std::numeric_limits<double>::infinity();
    OptimumInfo info;
    info.f_star = fmin;
    info.distance = [lo, hi](const Vec& y) {
        double x = y[0];
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;
    };
    return info;
}

}  // namespace

bool ObjectiveSuite::bounded() const {
    for (const auto& o : objectives)
        if (!o.globally_bounded) return false;
    return true;
}

ConvexObjective make_max_affine(std::vector<AffinePiece> pieces) {
    if (pieces.empty()) throw std::invalid_argument("make_max_affine: empty piece list");
    const int m = static_cast<int>(pieces.front().slope.size());
    if (m == 0) throw std::invalid_argument("make_max_affine: zero-dimensional slope");
    for (const auto& p : pieces)
        if (static_cast<int>(p.slope.size()) != m)
            throw std::invalid_argument("make_max_affine: slope length mismatch");

    double bound = 0.0;
    for (const auto& p : pieces) bound = std::max(bound, norm2(p.slope));

    auto shared = std::make_shared<std::vector<AffinePiece>>(pieces);
    ConvexObjective obj;
    obj.dimension = m;
    obj.subgradient_bound = bound;
    obj.globally_bounded = true;
    obj.pieces = std::move(pieces);
    obj.value = [shared, m](const Vec& x) {
        check_dim(m, x, "max_affine value");
        double best = dot((*shared)[0].slope, x) + (*shared)[0].intercept;
        for (std::size_t p = 1; p < shared->size(); ++p)
            best = std::max(best, dot((*shared)[p].slope, x) + (*shared)[p].intercept);
        return best;
    };
    obj.subgradient = [shared, m](const Vec& x) {
        check_dim(m, x, "max_affine subgradient");
        std::vector<double> vals(shared->size());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < shared->size(); ++p) {
            vals[p] = dot((*shared)[p].slope, x) + (*shared)[p].intercept;
            best = std::max(best, vals[p]);
        }
        std::vector<std::size_t> active;
        for (std::size_t p = 0; p < shared->size(); ++p)
            if (vals[p] == best) active.push_back(p);
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b)
                if (segment_contains_origin((*shared)[active[a]].slope, (*shared)[active[b]].slope))
                    return Vec(static_cast<std::size_t>(m), 0.0);
        return (*shared)[active.front()].slope;
    };
    return obj;
}

ConvexObjective make_abs_shift(Vec shift) {
    const int m = static_cast<int>(shift.size());
    if (m == 0) throw std::invalid_argument("make_abs_shift: empty shift");
    auto shared = std::make_shared<Vec>(shift);
    ConvexObjective obj;
    obj.dimension = m;
    obj.subgradient_bound = std::sqrt(static_cast<double>(m));
    obj.globally_bounded = true;
    obj.l1_shift = std::move(shift);
    obj.value = [shared, m](const Vec& x) {
        check_dim(m, x, "abs_shift value");
        double s = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) s += std::fabs(x[c] - (*shared)[c]);
        return s;
    };
    obj.subgradient = [shared, m](const Vec& x) {
        check_dim(m, x, "abs_shift subgradient");
        Vec g(x.size());
        for (std::size_t c = 0; c < x.size(); ++c) {
            double d = x[c] - (*shared)[c];
            g[c] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        }
        return g;
    };
    return obj;
}

ConvexObjective make_quadratic(Vec center) {
    const int m = static_cast<int>(center.size());
    if (m == 0) throw std::invalid_argument("make_quadratic: empty center");
    auto shared = std::make_shared<Vec>(std::move(center));
    ConvexObjective obj;
    obj.dimension = m;
    obj.subgradient_bound = std::numeric_limits<double>::infinity();
    obj.globally_bounded = false;
    obj.value = [shared, m](const Vec& x) {
        check_dim(m, x, "quadratic value");
        double s = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            double d = x[c] - (*shared)[c];
            s += d * d;
        }
        return s;
    };
    obj.subgradient = [shared, m](const Vec& x) {
        check_dim(m, x, "quadratic subgradient");
        Vec g(x.size());
        for (std::size_t c = 0; c < x.size(); ++c) g[c] = 2.0 * (x[c] - (*shared)[c]);
        return g;
    };
    return obj;
}

ObjectiveSuite make_suite(std::vector<ConvexObjective> objectives) {
    if (objectives.empty()) throw std::invalid_argument("make_suite: need at least one objective");
    const int m = objectives.front().dimension;
    for (const auto& o : objectives)
        if (o.dimension != m) throw std::invalid_argument("make_suite: dimension mismatch");
    ObjectiveSuite suite;
    suite.objectives = std::move(objectives);
    suite.L = 0.0;
    for (const auto& o : suite.objectives) suite.L = std::max(suite.L, o.subgradient_bound);
    if (suite.bounded()) {
        suite.optimum = l1_box_optimum(suite.objectives);
        if (!suite.optimum) suite.optimum = scan_1d_optimum(suite.objectives);
    }
    return suite;
}

ObjectiveSuite make_suite(std::vector<ConvexObjective> objectives, OptimumInfo optimum) {
    auto suite = make_suite(std::move(objectives));
    suite.optimum = std::move(optimum);
    return suite;
}

double eval_sum(const ObjectiveSuite& suite, const Vec& x) {
    check_dim(suite.m(), x, "eval_sum");
    double s = 0.0;
    for (const auto& o : suite.objectives) s += o.value(x);
    return s;
}

Vec subgradient_at(const ConvexObjective& obj, const Vec& x) {
    check_dim(obj.dimension, x, "subgradient_at");
    return obj.subgradient(x);
}

double dist_to_optimum(const ObjectiveSuite& suite, const Vec& y) {
    check_dim(suite.m(), y, "dist_to_optimum");
    if (!suite.optimum) throw UnsupportedQuery("dist_to_optimum: suite carries no optimum oracle");
    return suite.optimum->distance(y);
}

}  // namespace dsm
