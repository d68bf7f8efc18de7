#include "otcl/transport_simplex.hpp"

#include <algorithm>
#include <cmath>

namespace otcl {

namespace {

// Arc layout: real arcs e = i*n + j (source i -> sink m+j), then m
// artificial arcs source i -> root, then n artificial arcs root -> sink j.
// The root keeps the basis a spanning tree; artificial arcs carry Big-M cost
// so they drain to zero flow on feasible instances.
class TransportSimplex {
 public:
  TransportSimplex(const double* cost, int m, int n, std::span<const double> supply,
                   std::span<const double> demand)
      : c_(cost), m_(m), n_(n), real_arcs_(static_cast<long>(m) * n) {
    const int V = m_ + n_ + 1;
    root_ = m_ + n_;
    parent_.assign(V, root_);
    pred_arc_.assign(V, -1);
    up_dir_.assign(V, 0);
    depth_.assign(V, 1);
    pot_.assign(V, 0.0);
    children_.assign(V, {});
    flow_.assign(real_arcs_ + m_ + n_, 0.0);
    state_lower_.assign(real_arcs_, 1);

    max_finite_cost_ = 0.0;
    for (long e = 0; e < real_arcs_; ++e)
      if (!std::isinf(c_[e])) max_finite_cost_ = std::max(max_finite_cost_, c_[e]);
    big_ = (max_finite_cost_ + 1.0) * (m_ + n_ + 1);
    enter_tol_ = 1e-11 * (1.0 + max_finite_cost_);

    parent_[root_] = -1;
    depth_[root_] = 0;
    for (int i = 0; i < m_; ++i) {
      pred_arc_[i] = real_arcs_ + i;
      up_dir_[i] = +1;  // source -> root
      flow_[real_arcs_ + i] = supply[static_cast<size_t>(i)];
      pot_[i] = -big_;
      children_[root_].push_back(i);
    }
    for (int j = 0; j < n_; ++j) {
      pred_arc_[m_ + j] = real_arcs_ + m_ + j;
      up_dir_[m_ + j] = -1;  // root -> sink
      flow_[real_arcs_ + m_ + j] = demand[static_cast<size_t>(j)];
      pot_[m_ + j] = big_;
      children_[root_].push_back(m_ + j);
    }
    block_ = std::max(64L, static_cast<long>(std::sqrt(double(real_arcs_))));
  }

  void run() {
    long cap = 2000L * (m_ + n_) + 1000000L;
    long e;
    while ((e = find_entering()) >= 0) {
      pivot(e);
      if (++pivots_ > cap) throw SolverError("transport simplex: pivot cap exceeded");
    }
  }

  TransportSolution extract(std::span<const double> supply) const {
    TransportSolution sol;
    sol.flow.assign(static_cast<size_t>(real_arcs_), 0.0);
    sol.cost = 0.0;
    for (long e = 0; e < real_arcs_; ++e) {
      double f = std::max(flow_[static_cast<size_t>(e)], 0.0);
      if (f > 0.0) {
        sol.flow[static_cast<size_t>(e)] = f;
        sol.cost += f * c_[e];
      }
    }
    double total = 0.0;
    for (double s : supply) total += s;
    double art = 0.0;
    for (long e = real_arcs_; e < real_arcs_ + m_ + n_; ++e)
      art = std::max(art, std::fabs(flow_[static_cast<size_t>(e)]));
    sol.feasible = art <= 1e-12 * std::max(1.0, total) + 1e-15;

    sol.alpha.resize(static_cast<size_t>(m_));
    sol.beta.resize(static_cast<size_t>(n_));
    const double shift = pot_[0];
    for (int i = 0; i < m_; ++i) sol.alpha[static_cast<size_t>(i)] = shift - pot_[i];
    for (int j = 0; j < n_; ++j) sol.beta[static_cast<size_t>(j)] = pot_[m_ + j] - shift;
    sol.pivots = pivots_;
    return sol;
  }

 private:
  int arc_src(long e) const { return static_cast<int>(e / n_); }
  int arc_dst(long e) const { return m_ + static_cast<int>(e % n_); }

  double reduced_cost(long e) const {
    return c_[e] + pot_[arc_src(e)] - pot_[arc_dst(e)];
  }

  // Block pricing over real arcs; within a block the first strictly most
  // negative reduced cost wins, so ties resolve to the smallest arc id.
  long find_entering() {
    double best_rc = -enter_tol_;
    long best = -1;
    long scanned = 0, in_block = 0;
    long e = next_arc_;
    while (scanned < real_arcs_) {
      if (state_lower_[static_cast<size_t>(e)] && !std::isinf(c_[e])) {
        double rc = reduced_cost(e);
        if (rc < best_rc) {
          best_rc = rc;
          best = e;
        }
      }
      ++scanned;
      if (++e == real_arcs_) e = 0;
      if (++in_block == block_) {
        if (best >= 0) break;
        in_block = 0;
      }
    }
    if (best >= 0) next_arc_ = (best + 1 == real_arcs_) ? 0 : best + 1;
    return best;
  }

  int find_join(int u, int v) const {
    while (depth_[u] > depth_[v]) u = parent_[u];
    while (depth_[v] > depth_[u]) v = parent_[v];
    while (u != v) {
      u = parent_[u];
      v = parent_[v];
    }
    return u;
  }

  void detach(int w) {
    auto& sib = children_[parent_[w]];
    sib.erase(std::find(sib.begin(), sib.end(), w));
  }

  void pivot(long enter) {
    const int u_e = arc_src(enter), v_e = arc_dst(enter);
    const int join = find_join(u_e, v_e);

    // Leaving arc: strict improvement on the u_e-side path, non-strict on the
    // v_e side. This is the strongly-feasible tie-break; it bars cycling on
    // degenerate instances.
    double delta = kInf;
    int u_out = -1, out_side = 0;
    for (int w = u_e; w != join; w = parent_[w]) {
      if (up_dir_[w] == +1) {
        double d = flow_[static_cast<size_t>(pred_arc_[w])];
        if (d < delta) {
          delta = d;
          u_out = w;
          out_side = 1;
        }
      }
    }
    for (int w = v_e; w != join; w = parent_[w]) {
      if (up_dir_[w] == -1) {
        double d = flow_[static_cast<size_t>(pred_arc_[w])];
        if (d <= delta) {
          delta = d;
          u_out = w;
          out_side = 2;
        }
      }
    }
    if (u_out < 0) throw SolverError("transport simplex: unbounded pivot");

    // Push delta around the cycle (direction u_e -> enter -> v_e -> join -> u_e).
    if (delta > 0.0) {
      flow_[static_cast<size_t>(enter)] += delta;
      for (int w = u_e; w != join; w = parent_[w])
        flow_[static_cast<size_t>(pred_arc_[w])] += (up_dir_[w] == +1) ? -delta : +delta;
      for (int w = v_e; w != join; w = parent_[w])
        flow_[static_cast<size_t>(pred_arc_[w])] += (up_dir_[w] == +1) ? +delta : -delta;
    }

    const long leave = pred_arc_[u_out];
    flow_[static_cast<size_t>(leave)] = 0.0;
    if (leave < real_arcs_) state_lower_[static_cast<size_t>(leave)] = 1;
    state_lower_[static_cast<size_t>(enter)] = 0;

    // Re-hang the cut subtree at the entering arc, reversing the parent chain
    // from the entering endpoint inside it up to u_out.
    const int p_in = (out_side == 1) ? u_e : v_e;
    const int q_out = (out_side == 1) ? v_e : u_e;
    const double rc = reduced_cost(enter);
    const double shift = (p_in == u_e) ? -rc : +rc;

    int prev = q_out;
    long prev_arc = enter;
    int w = p_in;
    while (true) {
      const int old_parent = parent_[w];
      const long old_arc = pred_arc_[w];
      detach(w);
      parent_[w] = prev;
      pred_arc_[w] = prev_arc;
      up_dir_[w] = (arc_endpoint_src(prev_arc) == w) ? +1 : -1;
      children_[prev].push_back(w);
      if (w == u_out) break;
      prev = w;
      prev_arc = old_arc;
      w = old_parent;
    }

    // Shift potentials and fix depths across the re-hung subtree.
    dfs_stack_.clear();
    dfs_stack_.push_back(p_in);
    while (!dfs_stack_.empty()) {
      int u = dfs_stack_.back();
      dfs_stack_.pop_back();
      pot_[u] += shift;
      depth_[u] = depth_[parent_[u]] + 1;
      for (int ch : children_[u]) dfs_stack_.push_back(ch);
    }
  }

  int arc_endpoint_src(long e) const {
    if (e < real_arcs_) return arc_src(e);
    long a = e - real_arcs_;
    return (a < m_) ? static_cast<int>(a) : root_;  // source->root | root->sink
  }

  const double* c_;
  int m_, n_, root_;
  long real_arcs_;
  double max_finite_cost_ = 0.0, big_ = 0.0, enter_tol_ = 0.0;
  long block_ = 64, next_arc_ = 0, pivots_ = 0;

  std::vector<int> parent_, up_dir_, depth_;
  std::vector<long> pred_arc_;
  std::vector<double> pot_, flow_;
  std::vector<char> state_lower_;
  std::vector<std::vector<int>> children_;
  std::vector<int> dfs_stack_;
};

}  // namespace

TransportSolution solve_transport(const double* cost, int m, int n,
                                  std::span<const double> supply,
                                  std::span<const double> demand) {
  if (m <= 0 || n <= 0) throw PreconditionError("solve_transport: empty marginal");
  if (supply.size() != static_cast<size_t>(m) || demand.size() != static_cast<size_t>(n))
    throw PreconditionError("solve_transport: marginal size mismatch");
  double sa = 0.0, sb = 0.0;
  for (double v : supply) {
    if (!(v > 0.0)) throw PreconditionError("solve_transport: supplies must be positive");
    sa += v;
  }
  for (double v : demand) {
    if (!(v > 0.0)) throw PreconditionError("solve_transport: demands must be positive");
    sb += v;
  }
  if (std::fabs(sa - sb) > 1e-9) throw PreconditionError("solve_transport: marginal mismatch");

  TransportSimplex simplex(cost, m, n, supply, demand);
  simplex.run();
  return simplex.extract(supply);
}

}  // namespace otcl
