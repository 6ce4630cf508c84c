#include "metspace/operators.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace metspace {

namespace {

double cell_volume(const GridChart& c, const std::array<std::int64_t, 4>& m) {
  double v = 1.0;
  for (int a = 0; a < c.dim; ++a) {
    double w = c.spacing[a];
    if (c.on_boundary(m, a)) w *= 0.5;
    v *= w;
  }
  return v;
}

std::vector<NodeIndex> nearest_regular_nodes(const GridChart& c,
                                             const std::vector<std::uint8_t>& mask) {
  const NodeIndex n = c.node_count();
  std::vector<NodeIndex> rep(n, -1);
  std::deque<NodeIndex> queue;
  for (NodeIndex i = 0; i < n; ++i) {
    if (!mask[i]) {
      rep[i] = i;
      queue.push_back(i);
    }
  }
  if (queue.empty()) throw AllSingular("assembly: field has no regular nodes");
  std::array<int, 4> q{0, 0, 0, 0};
  while (!queue.empty()) {
    const NodeIndex i = queue.front();
    queue.pop_front();
    const auto m = c.multi(i);
    for (int a = 0; a < c.dim; ++a)
      for (int s = -1; s <= 1; s += 2) {
        q.fill(0);
        q[a] = s;
        const NodeIndex j = c.neighbor(m, q);
        if (j >= 0 && rep[j] < 0) {
          rep[j] = rep[i];
          queue.push_back(j);
        }
      }
  }
  return rep;
}

struct DiffTerm {
  NodeIndex node;
  double weight;
};

/// Central difference along `axis` where possible, one-sided at chart edges,
/// restricted to active nodes.  Weights sum to zero.
std::vector<DiffTerm> difference_stencil(const GridChart& c,
                                         const std::vector<std::uint8_t>& active,
                                         const std::array<std::int64_t, 4>& m,
                                         NodeIndex i, int axis) {
  std::array<int, 4> q{0, 0, 0, 0};
  q[axis] = 1;
  NodeIndex jp = c.neighbor(m, q);
  q[axis] = -1;
  NodeIndex jm = c.neighbor(m, q);
  if (jp >= 0 && !active.empty() && !active[jp]) jp = -1;
  if (jm >= 0 && !active.empty() && !active[jm]) jm = -1;
  const double h = c.spacing[axis];
  if (jp >= 0 && jm >= 0)
    return {{jp, 0.5 / h}, {jm, -0.5 / h}};
  if (jp >= 0) return {{jp, 1.0 / h}, {i, -1.0 / h}};
  if (jm >= 0) return {{i, 1.0 / h}, {jm, -1.0 / h}};
  return {};
}

}  // namespace

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& u) const {
  return (stiffness * u).cwiseQuotient(mass);
}

SparseOperator assemble_weighted(const GridChart& chart,
                                 const std::vector<SmallMat>& flux_weight,
                                 const std::vector<double>& mass_density,
                                 Bc bc, const std::vector<std::uint8_t>& active) {
  chart.validate();
  const NodeIndex n = chart.node_count();
  const int dim = chart.dim;
  auto is_active = [&](NodeIndex i) { return active.empty() || active[i]; };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (2 * dim + 1));

  std::array<int, 4> q{0, 0, 0, 0};
  for (NodeIndex i = 0; i < n; ++i) {
    if (!is_active(i)) continue;
    const auto m = chart.multi(i);

    // Face fluxes for the diagonal coefficient entries.
    for (int d = 0; d < dim; ++d) {
      q.fill(0);
      q[d] = 1;
      const NodeIndex j = chart.neighbor(m, q);
      if (j < 0 || !is_active(j)) continue;
      double area = 1.0;
      for (int e = 0; e < dim; ++e)
        if (e != d) area *= chart.spacing[e];
      const double w =
          0.5 * (flux_weight[i](d, d) + flux_weight[j](d, d)) * area / chart.spacing[d];
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
    }

    // Node-centered cross terms for off-diagonal coefficient entries.
    if (dim > 1) {
      const double vol = cell_volume(chart, m);
      for (int d = 0; d < dim; ++d) {
        for (int e = d + 1; e < dim; ++e) {
          const double cde = 0.5 * (flux_weight[i](d, e) + flux_weight[i](e, d));
          if (cde == 0.0) continue;
          const auto dd = difference_stencil(chart, active, m, i, d);
          const auto de = difference_stencil(chart, active, m, i, e);
          for (const auto& p : dd)
            for (const auto& r : de) {
              const double v = cde * vol * p.weight * r.weight;
              trips.emplace_back(p.node, r.node, v);
              trips.emplace_back(r.node, p.node, v);
            }
        }
      }
    }
  }

  SparseOperator op;
  op.chart = chart;
  op.n = n;
  op.bc = bc;
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.mass.resize(n);
  for (NodeIndex i = 0; i < n; ++i)
    op.mass(i) = is_active(i) ? mass_density[i] * cell_volume(chart, chart.multi(i))
                              : 1.0;

  if (bc == Bc::Dirichlet) {
    // Eliminate non-periodic chart boundary nodes: zero row/column, unit diag.
    std::vector<std::uint8_t> fixed(n, 0);
    for (NodeIndex i = 0; i < n; ++i) {
      const auto m = chart.multi(i);
      for (int a = 0; a < dim; ++a)
        if (chart.on_boundary(m, a)) fixed[i] = 1;
    }
    for (int k = 0; k < op.stiffness.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, k); it; ++it)
        if (fixed[it.row()] || fixed[it.col()])
          it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    op.stiffness.prune(0.0);
  }
  return op;
}

namespace {

/// Flux weights and mass density for the Laplace-Beltrami operator of g,
/// optionally with a covector coefficient A:  W = sqrt(det G) G^{-1} A.
void beltrami_weights(const MetricField& g, const EllField* coeff,
                      std::vector<SmallMat>& weights, std::vector<double>& density) {
  const GridChart& c = g.chart();
  const NodeIndex n = g.node_count();
  const auto rep = nearest_regular_nodes(c, g.mask());

  // Faces whose endpoints are all masked have no data to average.
  std::array<int, 4> q{0, 0, 0, 0};
  for (NodeIndex i = 0; i < n; ++i) {
    if (!g.singular(i)) continue;
    const auto m = c.multi(i);
    for (int d = 0; d < c.dim; ++d) {
      q.fill(0);
      q[d] = 1;
      const NodeIndex j = c.neighbor(m, q);
      if (j >= 0 && g.singular(j))
        throw SingularCell("assemble_laplacian: cell with all nodes masked");
    }
  }

  weights.resize(n);
  density.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    const SmallMat& gi = g.value(rep[i]);
    const double det = spd_det(gi);
    const double sqrtdet = std::sqrt(det);
    SmallMat w = sqrtdet * spd_inv(gi);
    if (coeff) {
      w = (w * coeff->values[i]).eval();
      const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff()))
        throw NotSymmetric("assemble_laplacian: coefficient not self-adjoint");
      w = 0.5 * (w + w.transpose()).eval();
    }
    weights[i] = w;
    density[i] = sqrtdet;
  }
}

}  // namespace

SparseOperator assemble_laplacian(const MetricField& g, const EllField* coeff,
                                  Bc bc) {
  if (coeff && !(coeff->chart == g.chart()))
    throw ChartMismatch("assemble_laplacian: coefficient chart mismatch");
  std::vector<SmallMat> weights;
  std::vector<double> density;
  beltrami_weights(g, coeff, weights, density);
  return assemble_weighted(g.chart(), weights, density, bc);
}

MetricField divform_to_metric(const EllField& coeff, const MetricField& g) {
  if (!(coeff.chart == g.chart()))
    throw ChartMismatch("divform_to_metric: chart mismatch");
  const NodeIndex n = g.node_count();
  const int dim = g.chart().dim;
  const double expo = -1.0 / static_cast<double>(dim + 2);

  std::vector<SmallMat> values(n);
  std::vector<std::uint8_t> mask(g.mask());
  for (NodeIndex i = 0; i < n; ++i) {
    if (mask[i]) {
      values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const SmallMat& gi = g.value(i);
    const SmallMat& ai = coeff.values[i];
    SmallMat ga = gi * ai;
    const double asym = (ga - ga.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, ga.cwiseAbs().maxCoeff()))
      throw NotSymmetric("divform_to_metric: A not g-self-adjoint at node " +
                         std::to_string(i));
    ga = 0.5 * (ga + ga.transpose()).eval();
    const double det_a = ai.determinant();
    if (!(det_a > 0.0))
      throw NotPositiveDefinite("divform_to_metric: det A <= 0 at node " +
                                std::to_string(i));
    const double f = std::pow(det_a, expo);
    values[i] = f * ga;

    // det B identity: det(G^{-1} H) = det(A)^{2/(n+2)}.
    const double det_b = values[i].determinant() / gi.determinant();
    const double expected = std::pow(det_a, 2.0 / static_cast<double>(dim + 2));
    if (std::abs(det_b - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
      throw Error("divform_to_metric: det identity violated at node " +
                  std::to_string(i));
  }
  return MetricField(g.chart(), std::move(values), std::move(mask),
                     g.label() + "_divform", 1.0);
}

namespace {

/// Smooth deterministic test field: a few separable cosine modes.
Eigen::VectorXd random_smooth_field(const GridChart& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> freq(1, 3);
  const NodeIndex n = c.node_count();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const int modes = 3;
  for (int k = 0; k < modes; ++k) {
    std::array<double, 4> omega{}, phase{};
    for (int a = 0; a < c.dim; ++a) {
      omega[a] = freq(rng) * M_PI / std::max(c.extent(a), 1e-12);
      phase[a] = coef(rng);
    }
    const double ck = coef(rng);
    for (NodeIndex i = 0; i < n; ++i) {
      const SmallVec x = c.coord(i);
      double v = ck;
      for (int a = 0; a < c.dim; ++a)
        v *= std::cos(omega[a] * (x(a) - c.origin[a]) + phase[a]);
      u(i) += v;
    }
  }
  return u;
}

/// Gradient-pairing weights of the divergence-form dictionary:
/// W = sqrt(det M) * M * A, mass density sqrt(det M).
void dictionary_weights(const MetricField& m, const EllField* coeff,
                        std::vector<SmallMat>& weights,
                        std::vector<double>& density) {
  const NodeIndex n = m.node_count();
  weights.resize(n);
  density.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    const SmallMat& mi = m.value(i);
    const double sqrtdet = std::sqrt(spd_det(mi));
    SmallMat w = sqrtdet * mi;
    if (coeff) w = (w * coeff->values[i]).eval();
    weights[i] = 0.5 * (w + w.transpose()).eval();
    density[i] = sqrtdet;
  }
}

}  // namespace

CorrespondenceReport operator_correspondence_check(const EllField& coeff,
                                                   const MetricField& g,
                                                   int trials, std::uint64_t seed) {
  const MetricField h = divform_to_metric(coeff, g);
  const GridChart& c = g.chart();
  const int dim = c.dim;

  std::vector<SmallMat> w_h, w_ga;
  std::vector<double> den_h, den_g;
  dictionary_weights(h, nullptr, w_h, den_h);
  dictionary_weights(g, &coeff, w_ga, den_g);
  const SparseOperator op_h = assemble_weighted(c, w_h, den_h);
  const SparseOperator op_ga = assemble_weighted(c, w_ga, den_g);

  Eigen::VectorXd multiplier(g.node_count());
  const double expo = -1.0 / static_cast<double>(dim + 2);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    multiplier(i) = std::pow(coeff.values[i].determinant(), expo);

  std::mt19937_64 rng(seed);
  CorrespondenceReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd u = random_smooth_field(c, rng);
    const Eigen::VectorXd lhs = op_h.apply(u);
    const Eigen::VectorXd rhs = multiplier.cwiseProduct(op_ga.apply(u));
    const double scale = std::max(lhs.cwiseAbs().maxCoeff(), 1e-12);
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      const auto m = c.multi(i);
      bool interior = true;
      for (int a = 0; a < dim; ++a) interior = interior && !c.on_boundary(m, a);
      if (!interior) continue;
      rep.max_rel_deviation =
          std::max(rep.max_rel_deviation, std::abs(lhs(i) - rhs(i)) / scale);
    }
  }
  return rep;
}

namespace {

Eigen::VectorXd cg_solve(const Eigen::SparseMatrix<double>& a,
                         const Eigen::VectorXd& rhs, double tol, double limit) {
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(10 * rhs.size());
  cg.compute(a);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.error() > limit)
    throw SolverDivergence("linear solve residual " + std::to_string(cg.error()));
  return x;
}

}  // namespace

double HeatRun::total_mass(std::size_t k) const {
  double s = 0.0;
  for (NodeIndex i = 0; i < mass.size(); ++i) s += fields[k].values[i] * mass(i);
  return s;
}

HeatRun heat_run(const SparseOperator& op, NodeIndex source,
                 const std::vector<double>& times, const HeatOptions& opts) {
  if (times.empty()) throw Error("heat_run: no times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1])) throw Error("heat_run: times must ascend");
  if (!(times.front() > 0.0)) throw Error("heat_run: times must be positive");
  if (source < 0 || source >= op.n) throw Error("heat_run: bad source node");

  HeatRun run;
  run.times = times;
  run.source = source;
  run.mass = op.mass;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(op.n);
  u(source) = 1.0 / op.mass(source);  // mass-normalized discrete delta

  Eigen::SparseMatrix<double> mass_mat(op.n, op.n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(op.n);
    for (NodeIndex i = 0; i < op.n; ++i) trips.emplace_back(i, i, op.mass(i));
    mass_mat.setFromTriplets(trips.begin(), trips.end());
  }

  auto advance = [&](double dt, int steps) {
    const Eigen::SparseMatrix<double> sys = mass_mat + dt * op.stiffness;
    for (int s = 0; s < steps; ++s)
      u = cg_solve(sys, (mass_mat * u).eval(), opts.solve_tolerance,
                   opts.residual_limit);
  };

  double t_cur = 0.0;
  bool first = true;
  for (double target : times) {
    const double span = target - t_cur;
    const int steps = std::max(2, opts.steps_per_interval);
    const double dt = span / steps;
    if (first) {
      advance(0.5 * dt, 2);  // Rannacher startup damps the rough initial data
      advance(dt, steps - 1);
      first = false;
    } else {
      advance(dt, steps);
    }
    t_cur = target;
    ScalarField f;
    f.chart = op.chart;
    f.values.assign(u.data(), u.data() + u.size());
    run.fields.push_back(std::move(f));
  }
  return run;
}

VaradhanEstimate varadhan_estimate(const HeatRun& run, NodeIndex target) {
  VaradhanEstimate est;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double rho = run.fields[k].values[target];
    if (!(rho > 0.0))
      throw NonPositiveKernel("varadhan_estimate: kernel not positive at t=" +
                              std::to_string(run.times[k]));
    est.per_time.push_back(-4.0 * run.times[k] * std::log(rho));
  }
  if (est.per_time.size() >= 2) {
    const double t1 = run.times[0], t2 = run.times[1];
    const double e1 = est.per_time[0], e2 = est.per_time[1];
    est.extrapolated = (t2 * e1 - t1 * e2) / (t2 - t1);
  } else {
    est.extrapolated = est.per_time[0];
  }
  return est;
}

PoincareResult poincare_measure(const MetricField& g, NodeIndex center, double r,
                                int p, int stencil_order) {
  if (p != 2) throw Error("poincare_measure: only p = 2 is implemented");
  const GridChart& c = g.chart();
  const DistanceMap dist = distance_map(g, center, stencil_order);

  std::vector<std::uint8_t> active(g.node_count(), 0);
  NodeIndex count = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    if (dist.values[i] <= r) {
      active[i] = 1;
      ++count;
    }
  if (count < 8) throw BallTooSmall("poincare_measure: ball has " +
                                    std::to_string(count) + " nodes");

  std::vector<SmallMat> weights;
  std::vector<double> density;
  beltrami_weights(g, nullptr, weights, density);
  const SparseOperator op = assemble_weighted(c, weights, density, Bc::Neumann, active);

  // Collapse to the active subset for the eigen iteration.
  std::vector<NodeIndex> local_of(g.node_count(), -1), global_of;
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    if (active[i]) {
      local_of[i] = static_cast<NodeIndex>(global_of.size());
      global_of.push_back(i);
    }
  const NodeIndex nl = static_cast<NodeIndex>(global_of.size());
  Eigen::SparseMatrix<double> s(nl, nl);
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < op.stiffness.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, k); it; ++it)
        if (active[it.row()] && active[it.col()])
          trips.emplace_back(local_of[it.row()], local_of[it.col()], it.value());
    s.setFromTriplets(trips.begin(), trips.end());
  }
  Eigen::VectorXd mass(nl);
  for (NodeIndex l = 0; l < nl; ++l) mass(l) = op.mass(global_of[l]);

  auto deflate = [&](Eigen::VectorXd& x) {
    const double avg = mass.dot(x) / mass.sum();
    x.array() -= avg;
  };

  // Deterministic start: first non-constant mode along axis 0.
  Eigen::VectorXd x(nl);
  {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (NodeIndex l = 0; l < nl; ++l) {
      const double v = c.coord(global_of[l])(0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = std::max(hi - lo, 1e-12);
    for (NodeIndex l = 0; l < nl; ++l)
      x(l) = std::cos(M_PI * (c.coord(global_of[l])(0) - lo) / span);
  }
  deflate(x);
  x /= std::sqrt(x.dot(mass.cwiseProduct(x)));

  const double scale = s.diagonal().sum() / std::max<double>(1, nl) /
                       (mass.sum() / std::max<double>(1, nl));
  const double sigma = 1e-8 * scale;
  Eigen::SparseMatrix<double> shifted = s;
  for (NodeIndex l = 0; l < nl; ++l) shifted.coeffRef(l, l) += sigma * mass(l);
  shifted.makeCompressed();

  double lambda = 0.0, lambda_prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y =
        cg_solve(shifted, mass.cwiseProduct(x).eval(), 1e-12, 1e-10);
    deflate(y);
    const double norm = std::sqrt(y.dot(mass.cwiseProduct(y)));
    if (!(norm > 0.0)) throw SolverDivergence("poincare_measure: iteration collapsed");
    y /= norm;
    lambda = y.dot(s * y) / y.dot(mass.cwiseProduct(y));
    x = y;
    if (std::abs(lambda - lambda_prev) <= 1e-10 * std::max(std::abs(lambda), 1.0))
      break;
    lambda_prev = lambda;
  }

  PoincareResult res;
  res.lambda1 = lambda;
  res.c1 = 1.0 / std::sqrt(lambda);
  res.ball_nodes = count;
  return res;
}

PoincareConstants poincare_propagate(double c1_h, double c2_h, double eta_h,
                                     double dl_gh, int n, double p, double q) {
  if (!(c1_h > 0.0) || c2_h < 0.0 || !(eta_h > 0.0) || !(dl_gh >= 0.0) ||
      !std::isfinite(dl_gh))
    throw Error("poincare_propagate: invalid inputs");
  const double np = std::isinf(p) ? 0.0 : n / (2.0 * p);
  const double nq = std::isinf(q) ? 0.0 : n / (2.0 * q);
  PoincareConstants out;
  out.c1 = 2.0 * c1_h * std::exp((np + nq + 1.0) * dl_gh);
  out.c2 = 2.0 * c2_h * std::exp((np + nq) * dl_gh);
  out.eta = eta_h * std::exp(2.0 * dl_gh);
  return out;
}

namespace {

double node_tensor_norm(const SmallMat& v, int r, int s, const SmallMat& g) {
  if (r == 0 && s == 0) return std::abs(v(0, 0));
  if (r == 0 && s == 1) return std::sqrt((v.col(0).dot(g * v.col(0))));
  if (r == 1 && s == 0) {
    const SmallMat gi = spd_inv(g);
    return std::sqrt(v.col(0).dot(gi * v.col(0)));
  }
  if (r == 1 && s == 1) {
    const SmallMat gi = spd_inv(g);
    return std::sqrt((g * v * gi * v.transpose()).trace());
  }
  throw Error("lp_norm: unsupported tensor rank");
}

}  // namespace

double lp_norm(const TensorField& u, double p, const MetricField& g) {
  if (!(u.chart == g.chart())) throw ChartMismatch("lp_norm: chart mismatch");
  const GridChart& c = g.chart();
  double acc = 0.0, sup = 0.0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.singular(i) || (!u.mask.empty() && u.mask[i])) continue;
    const double nv = node_tensor_norm(u.values[i], u.rank_cov, u.rank_con,
                                       g.value(i));
    if (std::isinf(p)) {
      sup = std::max(sup, nv);
    } else {
      const double m = std::sqrt(spd_det(g.value(i))) * cell_volume(c, c.multi(i));
      acc += std::pow(nv, p) * m;
    }
  }
  return std::isinf(p) ? sup : std::pow(acc, 1.0 / p);
}

double lp_norm(const ScalarField& u, double p, const MetricField& g) {
  TensorField t;
  t.chart = u.chart;
  t.rank_cov = 0;
  t.rank_con = 0;
  t.values.resize(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    SmallMat v(1, 1);
    v(0, 0) = u.values[i];
    t.values[i] = v;
  }
  t.mask = u.mask;
  return lp_norm(t, p, g);
}

std::pair<double, double> norm_preservation_bounds(int r, int s, int n, double p,
                                                   double dl) {
  const double measure_term = std::isinf(p) ? 0.0 : n / (2.0 * p);
  const double e = (r + s + measure_term) * dl;
  return {std::exp(-e), std::exp(e)};
}

}  // namespace metspace
