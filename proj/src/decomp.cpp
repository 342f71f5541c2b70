#include "hamrep/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace hamrep {

Box box_intersection(const Box& a, const Box& b, const std::vector<double>& periods) {
  const size_t d = a.dim();
  Box out;
  out.lo.resize(d);
  out.hi.resize(d);
  for (size_t k = 0; k < d; ++k) {
    double blo = b.lo[k], bhi = b.hi[k];
    if (periods[k] > 0 && (a.width(k) >= periods[k] - 1e-12 || b.width(k) >= periods[k] - 1e-12)) {
      const bool afull = a.width(k) >= periods[k] - 1e-12;
      out.lo[k] = afull ? blo : a.lo[k];
      out.hi[k] = afull ? bhi : a.hi[k];
      continue;
    }
    if (periods[k] > 0) {
      // Shift b by a multiple of the period to overlap a as much as possible.
      const double p = periods[k];
      double best = -1.0, bl = blo, bh = bhi;
      for (int s = -1; s <= 1; ++s) {
        const double l = std::max(a.lo[k], blo + s * p);
        const double h = std::min(a.hi[k], bhi + s * p);
        if (h - l > best) {
          best = h - l;
          bl = blo + s * p;
          bh = bhi + s * p;
        }
      }
      blo = bl;
      bhi = bh;
    }
    out.lo[k] = std::max(a.lo[k], blo);
    out.hi[k] = std::min(a.hi[k], bhi);
    if (out.hi[k] <= out.lo[k]) {
      out.lo.assign(d, 0.0);
      out.hi.assign(d, 0.0);
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// split_zero_mean

SplitResult split_zero_mean(const GridFunction& f, const BumpBasis& profile) {
  const GridSpec& spec = f.spec();
  const size_t d = spec.dim();
  for (const auto& ax : spec.axes) {
    if (ax.kind != AxisKind::Interval)
      throw ArgumentError("split_zero_mean: expects interval axes (compactly supported input)");
  }
  const double fsup = f.sup_norm();
  if (std::fabs(integral(f)) > 1e-10 * std::max(1.0, fsup))
    throw PreconditionError("split_zero_mean: integral(f) != 0");

  // Per-axis profile r_k scaled into the axis; integral of r_k over the axis
  // equals the axis length, which is what the telescoping needs.
  std::vector<double> ctr(d), scl(d);
  for (size_t k = 0; k < d; ++k) {
    ctr[k] = 0.5 * (spec.axes[k].lo + spec.axes[k].hi);
    scl[k] = 0.7 * spec.axes[k].length();  // support stays inside the open box
  }
  const auto r_axis = [&](size_t k, double x) {
    return profile.eval((x - ctr[k]) / scl[k]) * spec.axes[k].length() / scl[k];
  };

  // partial[k] = (1/prod_{i<k} L_i) * integral of f over the first k coords,
  // living on the reduced grid of coordinates k..d-1.
  std::vector<GridFunction> partial(d + 1);
  partial[0] = f;
  for (size_t k = 1; k <= d; ++k) {
    partial[k] = fiber_integral(partial[k - 1], 0);
    partial[k] *= 1.0 / spec.axes[k - 1].length();
  }

  SplitResult out;
  const size_t total = f.size();
  std::vector<std::vector<double>> parts(d, std::vector<double>(total, 0.0));
  std::vector<size_t> idx(d, 0);
  std::vector<double> x(d);
  std::vector<size_t> ridx(d);
  for (size_t flat = 0; flat < total; ++flat) {
    for (size_t k = 0; k < d; ++k) x[k] = spec.axes[k].coord(idx[k]);
    double prev = f.values()[flat];  // R_0 F_0 = f
    double rprod = 1.0;
    for (size_t k = 1; k <= d; ++k) {
      rprod *= r_axis(k - 1, x[k - 1]);
      double Fk = 0.0;  // F_d = 0 by the zero-integral hypothesis
      if (k < d) {
        ridx.assign(idx.begin() + static_cast<long>(k), idx.end());
        Fk = partial[k].at(ridx);
      }
      const double cur = rprod * Fk;
      parts[k - 1][flat] = prev - cur;
      prev = cur;
    }
    for (size_t k = d; k-- > 0;) {
      if (++idx[k] < spec.axes[k].n) break;
      idx[k] = 0;
    }
  }

  for (size_t k = 0; k < d; ++k) out.parts.emplace_back(spec, std::move(parts[k]));
  for (int m = 1; m <= 3; ++m) {
    const double denom = deriv_sup_norm(f, m);
    double worst = 0.0;
    for (const auto& p : out.parts) worst = std::max(worst, deriv_sup_norm(p, m));
    out.constants_achieved[static_cast<size_t>(m - 1)] = denom > 0 ? worst / denom : 0.0;
  }
  return out;
}

ReportFragment verify_split(const GridFunction& f, const SplitResult& split) {
  ReportFragment frag;
  frag.module = "decomp.split_zero_mean";
  GridFunction sum = GridFunction::zeros(f.spec());
  for (const auto& p : split.parts) sum += p;
  sum -= f;
  const double scale = std::max(1.0, f.sup_norm());
  frag.require("reconstruction_sup", sum.sup_norm(), 1e-10 * scale);
  for (size_t j = 0; j < split.parts.size(); ++j) {
    frag.require("fiber_mean_axis" + std::to_string(j),
                 fiber_integral(split.parts[j], j).sup_norm(), 1e-10 * scale);
  }
  return frag;
}

// ---------------------------------------------------------------------------
// localize

namespace {

struct Edge {
  size_t a, b;
  double overlap;
  Box inter;
};

// Mollified indicator of box B, zero outside, 1 deep inside.
double box_profile(const Box& B, const std::vector<double>& x,
                   const std::vector<double>& periods) {
  double w = 1.0;
  for (size_t k = 0; k < B.dim(); ++k) {
    double xi = x[k];
    if (periods[k] > 0) {
      if (B.width(k) >= periods[k] - 1e-12) continue;  // full axis
      const double p = periods[k];
      xi = B.lo[k] + std::fmod(std::fmod(xi - B.lo[k], p) + p, p);
    }
    const double margin = 0.35 * B.width(k);
    w *= smooth_step((xi - B.lo[k]) / margin) * smooth_step((B.hi[k] - xi) / margin);
    if (w == 0.0) return 0.0;
  }
  return w;
}

}  // namespace

LocalizeResult localize(const GridFunction& f, const std::vector<Box>& cover) {
  const GridSpec& spec = f.spec();
  const size_t d = spec.dim();
  const size_t m = cover.size();
  if (m == 0) throw CoverError("localize: empty cover");
  for (const auto& B : cover) {
    if (B.dim() != d) throw ArgumentError("localize: box dimension mismatch");
  }
  const double fsup = f.sup_norm();
  if (std::fabs(integral(f)) > 1e-10 * std::max(1.0, fsup))
    throw PreconditionError("localize: integral(f) != 0");

  std::vector<double> periods(d);
  for (size_t k = 0; k < d; ++k)
    periods[k] = spec.axes[k].kind == AxisKind::Periodic ? spec.axes[k].length() : -1.0;

  LocalizeResult out;
  out.cover = cover;
  if (m == 1) {
    out.parts.push_back(f);
    out.bound_ratio = 1.0;
    return out;
  }

  // Subordinate weights w_i = profile_i / sum profiles.
  const size_t total = f.size();
  std::vector<std::vector<double>> w(m, std::vector<double>(total, 0.0));
  {
    std::vector<size_t> idx(d, 0);
    std::vector<double> x(d);
    for (size_t flat = 0; flat < total; ++flat) {
      for (size_t k = 0; k < d; ++k) x[k] = spec.axes[k].coord(idx[k]);
      double sum = 0.0;
      for (size_t i = 0; i < m; ++i) {
        w[i][flat] = box_profile(cover[i], x, periods);
        sum += w[i][flat];
      }
      if (sum <= 1e-9)
        throw CoverError("localize: cover does not reach a grid point");
      for (size_t i = 0; i < m; ++i) w[i][flat] /= sum;
      for (size_t k = d; k-- > 0;) {
        if (++idx[k] < spec.axes[k].n) break;
        idx[k] = 0;
      }
    }
  }

  std::vector<GridFunction> parts;
  parts.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    std::vector<double> v(total);
    for (size_t t = 0; t < total; ++t) v[t] = w[i][t] * f.values()[t];
    parts.emplace_back(spec, std::move(v));
  }

  // Maximum-overlap spanning tree (largest overlaps merged first).
  std::vector<Edge> edges;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      Box inter = box_intersection(cover[i], cover[j], periods);
      const double vol = inter.volume();
      if (vol > 0) edges.push_back({i, j, vol, inter});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return std::make_pair(a.a, a.b) < std::make_pair(b.a, b.b);
  });
  std::vector<size_t> comp(m);
  std::iota(comp.begin(), comp.end(), size_t{0});
  const std::function<size_t(size_t)> find = [&](size_t i) {
    while (comp[i] != i) i = comp[i] = comp[comp[i]];
    return i;
  };
  std::vector<Edge> tree;
  for (const auto& e : edges) {
    const size_t ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      comp[ra] = rb;
      tree.push_back(e);
    }
  }
  for (size_t i = 1; i < m; ++i) {
    if (find(i) != find(0)) throw CoverError("localize: overlap graph is disconnected");
  }

  // Orient toward root 0 and push excess mass leaf-to-root through unit
  // bumps in pair intersections.
  std::vector<std::vector<size_t>> adj(m);
  for (size_t t = 0; t < tree.size(); ++t) {
    adj[tree[t].a].push_back(t);
    adj[tree[t].b].push_back(t);
  }
  std::vector<size_t> order;
  std::vector<size_t> parent_edge(m, SIZE_MAX);
  {
    std::vector<size_t> stack{0};
    std::vector<bool> seen(m, false);
    seen[0] = true;
    while (!stack.empty()) {
      const size_t u = stack.back();
      stack.pop_back();
      order.push_back(u);
      for (size_t t : adj[u]) {
        const size_t v = tree[t].a == u ? tree[t].b : tree[t].a;
        if (!seen[v]) {
          seen[v] = true;
          parent_edge[v] = t;
          stack.push_back(v);
        }
      }
    }
  }

  BumpBasis bump = make_bump(1.0);
  for (size_t oi = order.size(); oi-- > 1;) {
    const size_t u = order[oi];
    const size_t t = parent_edge[u];
    const size_t p = tree[t].a == u ? tree[t].b : tree[t].a;
    const double excess = integral(parts[u]);
    if (excess == 0.0) continue;
    const Box& inter = tree[t].inter;
    for (size_t k = 0; k < d; ++k) {
      if (inter.width(k) < 6.0 * spec.axes[k].step())
        throw CoverError("localize: overlap too thin for a transfer bump at grid resolution");
    }
    GridFunction h = GridFunction::sample(spec, [&](const std::vector<double>& x) {
      double v = 1.0;
      for (size_t k = 0; k < d; ++k) {
        double xi = x[k];
        if (periods[k] > 0) xi = inter.center(k) + std::remainder(xi - inter.center(k), periods[k]);
        const double s = 0.6 * inter.width(k);  // support 0.4*width inside the overlap
        v *= bump.eval((xi - inter.center(k)) / s);
      }
      return v;
    });
    const double hint = integral(h);
    if (hint <= 0) throw CoverError("localize: transfer bump has no mass at grid resolution");
    h *= 1.0 / hint;
    parts[u] -= excess * h;
    parts[p] += excess * h;
  }

  out.parts = std::move(parts);
  out.bound_ratio = 0.0;
  for (const auto& p : out.parts)
    out.bound_ratio = std::max(out.bound_ratio, fsup > 0 ? p.sup_norm() / fsup : 0.0);
  return out;
}

ReportFragment verify_localize(const GridFunction& f, const LocalizeResult& res) {
  ReportFragment frag;
  frag.module = "decomp.localize";
  GridFunction sum = GridFunction::zeros(f.spec());
  for (const auto& p : res.parts) sum += p;
  sum -= f;
  const double scale = std::max(1.0, f.sup_norm());
  frag.require("reconstruction_sup", sum.sup_norm(), 1e-10 * scale);
  for (size_t i = 0; i < res.parts.size(); ++i) {
    frag.require("zero_integral_part" + std::to_string(i), std::fabs(integral(res.parts[i])),
                 1e-10 * scale);
  }
  const GridSpec& spec = f.spec();
  std::vector<double> periods(spec.dim());
  for (size_t k = 0; k < spec.dim(); ++k)
    periods[k] = spec.axes[k].kind == AxisKind::Periodic ? spec.axes[k].length() : -1.0;
  for (size_t i = 0; i < res.parts.size(); ++i) {
    double outside = 0.0;
    const auto& p = res.parts[i];
    for (size_t flat = 0; flat < p.size(); ++flat) {
      const auto x = p.coords(p.unflatten(flat));
      bool in = true;
      for (size_t k = 0; k < spec.dim() && in; ++k) {
        double xi = x[k];
        const Box& B = res.cover[i];
        if (periods[k] > 0) {
          if (B.width(k) >= periods[k] - 1e-12) continue;
          xi = B.lo[k] + std::fmod(std::fmod(xi - B.lo[k], periods[k]) + periods[k], periods[k]);
        }
        in = (xi >= B.lo[k] - 1e-12 && xi <= B.hi[k] + 1e-12);
      }
      if (!in) outside = std::max(outside, std::fabs(p.values()[flat]));
    }
    frag.require("support_part" + std::to_string(i), outside, 1e-13 * scale);
  }
  return frag;
}

}  // namespace hamrep
