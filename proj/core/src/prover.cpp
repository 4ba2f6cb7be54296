#include "roa/prover.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <thread>

namespace roa {

ExprFn::ExprFn(Expr e, bool with_gradient) : expr_(std::move(e)) {
    support_ = expr_.free_vars();
    if (with_gradient) {
        grad_.reserve(support_.size());
        for (int v : support_) grad_.push_back(expr_.differentiate(v));
    }
}

Interval ExprFn::enclose(const Box& box) const { return expr_.eval_interval(box); }

Interval ExprFn::enclose_refined(const Box& box) const {
    Interval natural = expr_.eval_interval(box);
    if (grad_.empty()) return natural;
    std::vector<double> c = box.midpoint();
    Interval centered = Interval::point(expr_.eval(c));
    for (std::size_t k = 0; k < support_.size(); ++k) {
        int d = support_[k];
        Interval offset = isub(box[d], Interval::point(c[d]));
        centered = iadd(centered, imul(grad_[k].eval_interval(box), offset));
    }
    Interval out;
    if (!iintersect(natural, centered, out)) {
        // enclosures of the same range always intersect up to rounding;
        // fall back to the natural extension
        return natural;
    }
    return out;
}

double ExprFn::value(const std::vector<double>& point) const { return expr_.eval(point); }

namespace {

struct WorkItem {
    Box box;
    int stale = 0;  // consecutive ancestors the natural extension failed to prune
};

struct SearchCtx {
    const Query* q;
    std::vector<int> split_dims;
    std::vector<double> inv_domain_width;  // per split dim
    bool mean_value = false;
    std::atomic<bool>* stop;
    std::atomic<std::uint64_t>* boxes;
};

// Relative width of the box along split dims; returns the widest dim
// (ties: lowest index) and its relative width.
std::pair<int, double> widest_split_dim(const SearchCtx& ctx, const Box& box) {
    int best = -1;
    double best_w = -1.0;
    for (std::size_t k = 0; k < ctx.split_dims.size(); ++k) {
        int d = ctx.split_dims[k];
        double w = box[d].width() * ctx.inv_domain_width[k];
        if (w > best_w) {
            best_w = w;
            best = d;
        }
    }
    return {best, best_w};
}

// Depth-first search over one chunk of the domain. Returns when the chunk
// is exhausted (Verified), a refutation or unknown box is found, or the
// stop flag is raised by another worker.
Verdict search_chunk(const SearchCtx& ctx, Box root) {
    const Query& q = *ctx.q;
    Verdict out;
    std::vector<WorkItem> stack;
    stack.push_back({std::move(root), 0});

    while (!stack.empty()) {
        if (ctx.stop->load(std::memory_order_relaxed)) return out;
        WorkItem item = std::move(stack.back());
        stack.pop_back();
        const Box& box = item.box;

        std::uint64_t seen = ctx.boxes->fetch_add(1, std::memory_order_relaxed) + 1;
        if (seen > q.budget) throw ResourceExhausted(q.budget);
        out.boxes_processed++;

        // (i) premise infeasible on the whole box
        bool pruned = false;
        for (const auto& p : q.premises) {
            if (p->enclose(box).lo > q.delta) {
                pruned = true;
                break;
            }
        }
        if (pruned) continue;

        // (ii) goal holds on the whole box up to the delta slack
        bool use_refined = ctx.mean_value && item.stale >= 2;
        Interval g = use_refined ? q.goal->enclose_refined(box) : q.goal->enclose(box);
        if (g.hi <= q.delta) continue;

        // (iii) width floor: sample the midpoint
        auto [dim, relw] = widest_split_dim(ctx, box);
        if (dim < 0 || relw < q.min_width) {
            std::vector<double> mid = box.midpoint();
            bool feasible = true;
            for (const auto& p : q.premises) {
                if (p->value(mid) > q.delta) {
                    feasible = false;
                    break;
                }
            }
            double gv = feasible ? q.goal->value(mid) : 0.0;
            if (feasible && gv > 0.0) {
                out.status = VerdictStatus::Refuted;
                out.witness = std::move(mid);
                out.witness_goal_value = gv;
                ctx.stop->store(true, std::memory_order_relaxed);
                return out;
            }
            // inconclusive box: remember the first one but keep searching,
            // a refutation elsewhere still decides the query
            if (out.status == VerdictStatus::Verified) {
                out.status = VerdictStatus::DeltaUnknown;
                out.unknown_box = box;
            }
            continue;
        }

        // (iv) bisect along the widest dimension
        WorkItem left{box, item.stale + 1}, right{box, item.stale + 1};
        double m = box[dim].mid();
        left.box[dim].hi = m;
        right.box[dim].lo = m;
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }
    return out;
}

Verdict run_check(const Query& q, bool mean_value) {
    auto t0 = std::chrono::steady_clock::now();

    std::set<int> dims;
    if (q.goal) {
        for (int d : q.goal->support()) dims.insert(d);
    }
    for (const auto& p : q.premises)
        for (int d : p->support()) dims.insert(d);

    SearchCtx ctx;
    ctx.q = &q;
    ctx.split_dims.assign(dims.begin(), dims.end());
    for (int d : ctx.split_dims) {
        double w = q.domain[d].width();
        ctx.inv_domain_width.push_back(w > 0.0 ? 1.0 / w : 0.0);
    }
    ctx.mean_value = mean_value;

    std::atomic<bool> stop{false};
    std::atomic<std::uint64_t> boxes{0};
    ctx.stop = &stop;
    ctx.boxes = &boxes;

    int jobs = std::max(1, q.jobs);
    Verdict result;

    if (jobs == 1 || ctx.split_dims.empty()) {
        result = search_chunk(ctx, q.domain);
    } else {
        // static partition: breadth-first split into >= 4*jobs chunks,
        // round-robin assignment, deterministic precedence on aggregation
        std::deque<Box> chunks{q.domain};
        while (static_cast<int>(chunks.size()) < 4 * jobs) {
            Box b = chunks.front();
            auto [dim, relw] = widest_split_dim(ctx, b);
            if (dim < 0 || relw < q.min_width) break;
            chunks.pop_front();
            Box l = b, r = b;
            double m = b[dim].mid();
            l[dim].hi = m;
            r[dim].lo = m;
            chunks.push_back(l);
            chunks.push_back(r);
        }
        std::vector<Box> chunk_vec(chunks.begin(), chunks.end());
        std::vector<Verdict> verdicts(chunk_vec.size());
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (;;) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= chunk_vec.size()) return;
                        verdicts[i] = search_chunk(ctx, chunk_vec[i]);
                        if (verdicts[i].status == VerdictStatus::Refuted) return;
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                }
            });
        }
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        // precedence: any Refuted > any DeltaUnknown > all Verified
        for (const auto& v : verdicts) {
            result.boxes_processed += v.boxes_processed;
            if (v.status == VerdictStatus::Refuted &&
                result.status != VerdictStatus::Refuted) {
                result.status = v.status;
                result.witness = v.witness;
                result.witness_goal_value = v.witness_goal_value;
            } else if (v.status == VerdictStatus::DeltaUnknown &&
                       result.status == VerdictStatus::Verified) {
                result.status = v.status;
                result.unknown_box = v.unknown_box;
            }
        }
    }

    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

Verdict check(const Query& q) { return run_check(q, false); }

Verdict check_with_mean_value(const Query& q) { return run_check(q, true); }

double bisect_level(const std::function<bool(double)>& verified_at,
                    double lo, double hi, double tol) {
    if (!verified_at(lo)) throw NoLevel();
    // never probe hi itself: the returned level is always a strictly
    // verified lower bound, so an always-verified family reports hi - O(tol)
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (verified_at(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace roa
