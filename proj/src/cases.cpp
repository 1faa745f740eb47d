#include "sigmaqc/cases.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace sqc {

namespace {

using Params = std::map<std::string, double>;

double take(const Params& given, Params& used, const std::string& key, double fallback) {
  const auto it = given.find(key);
  const double v = it == given.end() ? fallback : it->second;
  used[key] = v;
  return v;
}

void reject_unknown(const std::string& name, const Params& given, const Params& used) {
  for (const auto& [key, value] : given) {
    if (!used.contains(key)) throw CaseError("unknown parameter '" + key + "' for case " + name);
  }
}

ExactSolution identity_map() {
  return {[](Vec2 x) { return x; }, [](Vec2) { return Mat2::identity(); }, [](Vec2) { return 1.0; },
          [](Vec2) { return 1.0; }};
}

CaseBundle identity_case(const Params& given) {
  CaseBundle c;
  reject_unknown("identity", given, c.params);
  c.name = "identity";
  c.sigma = [](Vec2) { return Mat2::identity(); };
  c.grad_b = [](Vec2) { return Vec2{}; };
  c.grad_c = [](Vec2) { return Vec2{}; };
  c.exact_E = 0.0;
  c.exact = identity_map();
  c.oracle = {{"d_sigma", 1.0}, {"w1", 1.0}, {"w2", 1.0}, {"harnack_H", 1.0},
              {"energy", 2.0},  {"area", 1.0}, {"k_ess", 0.0}};
  return c;
}

CaseBundle hypocycloid_case(const Params& given) {
  CaseBundle c;
  const double half = take(given, c.params, "half_width", 0.7);
  reject_unknown("hypocycloid", given, c.params);
  if (!(half > 0.0) || 2.0 * half * half >= 1.0) {
    throw CaseError("hypocycloid half_width must lie in (0, 1/sqrt(2)) so the square stays inside the unit disk");
  }
  c.name = "hypocycloid";
  c.topology = Topology::dirichlet;
  c.domain = {-half, half, -half, half};
  c.sigma = [](Vec2) { return Mat2::identity(); };
  c.grad_b = [](Vec2) { return Vec2{}; };
  c.grad_c = [](Vec2) { return Vec2{}; };
  c.exact_E = 0.0;
  c.analytic_map = true;
  // U(z) = z + conj(z)^2 / 2
  c.exact = ExactSolution{
      [](Vec2 p) { return Vec2{p.x + 0.5 * (p.x * p.x - p.y * p.y), p.y - p.x * p.y}; },
      [](Vec2 p) { return Mat2{1.0 + p.x, -p.y, -p.y, 1.0 - p.x}; },
      [](Vec2 p) { return 1.0 - dot(p, p); },
      [](Vec2 p) { return (1.0 + dot(p, p)) / (1.0 - dot(p, p)); }};
  c.boundary = c.exact->U;
  c.oracle = {{"d_sigma_r_half", 5.0 / 3.0}, {"harnack_H_disk_half", 5.0 / 3.0}, {"k_ess", 0.0}};
  return c;
}

CaseBundle laminate_case(const Params& given) {
  CaseBundle c;
  const double a1 = take(given, c.params, "a1", 2.0);
  const double a2 = take(given, c.params, "a2", 0.5);
  reject_unknown("laminate", given, c.params);
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw CaseError("laminate phases must be positive");
  c.name = "laminate";
  const auto a = [a1, a2](double x) { return x < 0.5 ? a1 : a2; };
  c.sigma = [a](Vec2 p) { return Mat2::diag(a(p.x), 1.0 / a(p.x)); };
  c.alpha = std::min({a1, a2, 1.0 / a1, 1.0 / a2});
  c.beta = 1.0 / c.alpha;
  c.grad_b = [](Vec2) { return Vec2{}; };
  c.grad_c = [](Vec2) { return Vec2{}; };
  c.exact_E = 0.0;
  c.grid_multiple = 2;
  const double H = 1.0 / (0.5 / a1 + 0.5 / a2);
  c.exact = ExactSolution{nullptr, [a, H](Vec2 p) { return Mat2::diag(H / a(p.x), 1.0); },
                          [a, H](Vec2 p) { return H / a(p.x); }, [H](Vec2) { return (H * H + 1.0) / (2.0 * H); }};
  c.oracle = {{"H", H},
              {"d_sigma", (H * H + 1.0) / (2.0 * H)},
              {"w1", 1.0 / H},
              {"w2", H},
              {"harnack_H", 1.0},
              {"energy", H + 1.0 / H},
              {"area", 1.0},
              {"trace", 0.5 * (a1 + 1.0 / a1 + a2 + 1.0 / a2)},
              {"ap_p2", 0.5 * (a1 + a2) / H}};
  return c;
}

CaseBundle constant_nonsymmetric_case(const Params& given) {
  CaseBundle c;
  const double t = take(given, c.params, "t", 1.0);
  reject_unknown("constant_nonsymmetric", given, c.params);
  c.name = "constant_nonsymmetric";
  c.sigma = [t](Vec2) { return Mat2{1.0, -t, t, 1.0}; };
  c.alpha = 1.0;
  c.beta = 1.0 + t * t;
  c.grad_b = [](Vec2) { return Vec2{}; };
  c.grad_c = [](Vec2) { return Vec2{}; };
  c.exact_E = 0.0;
  c.exact = identity_map();
  c.oracle = {{"d_sigma", 1.0}, {"w1", 1.0}, {"w2", 1.0},
              {"harnack_H", 1.0}, {"energy", 2.0}, {"area", 1.0},
              {"nu_abs", std::abs(t) / std::sqrt(t * t + 4.0)}};
  return c;
}

CaseBundle smooth_detvarying_case(const Params& given) {
  CaseBundle c;
  const double lambda = take(given, c.params, "lambda", 0.3);
  reject_unknown("smooth_detvarying", given, c.params);
  if (!(std::abs(lambda) < 1.0)) throw CaseError("smooth_detvarying needs |lambda| < 1");
  c.name = "smooth_detvarying";
  constexpr double tau = 2.0 * std::numbers::pi;
  c.sigma = [lambda](Vec2 p) {
    return Mat2::diag(1.0 + lambda * std::sin(tau * p.x) * std::sin(tau * p.y), 1.0);
  };
  c.alpha = 1.0 - std::abs(lambda);
  c.beta = 1.0 + std::abs(lambda);
  c.grad_b = [](Vec2) { return Vec2{}; };
  c.grad_c = [lambda](Vec2 p) {
    return tau * lambda * Vec2{std::cos(tau * p.x) * std::sin(tau * p.y), std::sin(tau * p.x) * std::cos(tau * p.y)};
  };
  c.exact_E = tau * std::abs(lambda);
  c.oracle = {{"area", 1.0}, {"E", tau * std::abs(lambda)}};
  return c;
}

CaseBundle kneser_rado_case(const Params& given) {
  CaseBundle c;
  const double kappa = take(given, c.params, "kappa", 0.5);
  const double tau = take(given, c.params, "tau", 0.3);
  const double shear = take(given, c.params, "shear", 0.0);
  reject_unknown("kneser_rado_convex", given, c.params);
  if (!(kappa > -1.0)) throw CaseError("kneser_rado_convex needs kappa > -1");
  c.name = "kneser_rado_convex";
  c.topology = Topology::dirichlet;
  c.sigma = [kappa, tau](Vec2 p) { return Mat2{1.0 + kappa * p.x, -tau * p.y, tau * p.y, 1.0}; };
  c.alpha = std::min(1.0, 1.0 + kappa);
  c.beta = std::max(1.0 + std::max(kappa, 0.0) + tau * tau, 1.0 + tau * tau / (1.0 + std::min(kappa, 0.0)));
  c.grad_b = [tau](Vec2) { return Vec2{0.0, -2.0 * tau}; };
  c.grad_c = [kappa, tau](Vec2 p) { return Vec2{kappa, 2.0 * tau * tau * p.y}; };
  c.exact_E = std::hypot(kappa, 2.0 * tau * tau) + 2.0 * std::abs(tau);
  // The boundary of the unit square goes onto a parallelogram.
  c.boundary = [shear](Vec2 p) { return Vec2{p.x + shear * p.y, p.y}; };
  c.oracle = {{"E", *c.exact_E}};
  return c;
}

const std::map<std::string, CaseBundle (*)(const Params&)>& registry() {
  static const std::map<std::string, CaseBundle (*)(const Params&)> r = {
      {"identity", identity_case},
      {"hypocycloid", hypocycloid_case},
      {"laminate", laminate_case},
      {"constant_nonsymmetric", constant_nonsymmetric_case},
      {"smooth_detvarying", smooth_detvarying_case},
      {"kneser_rado_convex", kneser_rado_case},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names = {"identity",  "hypocycloid",       "laminate", "constant_nonsymmetric",
                                                 "smooth_detvarying", "kneser_rado_convex"};
  return names;
}

CaseBundle make_case(const std::string& name, const std::map<std::string, double>& params) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw CaseError("unknown case '" + name + "'");
  CaseBundle c = it->second(params);
  // Validate the parameters on a coarse grid before anyone builds a fine one.
  (void)c.sigma_on(c.grid(16 * c.grid_multiple));
  return c;
}

Grid CaseBundle::grid(int n) const {
  if (n % grid_multiple != 0) {
    throw GridError("case " + name + " needs grid sizes divisible by " + std::to_string(grid_multiple));
  }
  return Grid::build(n, n, domain, topology);
}

SigmaField CaseBundle::sigma_on(const Grid& g) const {
  SigmaField s = SigmaField::create(MatrixField::sample(g, sigma), alpha, beta);
  if (grad_b && grad_c) {
    s = s.with_exact_gradients(
        {VectorField::sample(g, grad_b), VectorField::sample(g, grad_c), exact_E.value_or(0.0)});
  }
  return s;
}

MapField CaseBundle::map_on(const SigmaField& s, const SolverOptions& options, SolveInfo* info) const {
  const Grid& g = s.grid();
  if (analytic_map) {
    const auto& U = exact->U;
    return {NodalField::sample(g, [&](Vec2 p) { return U(p).x; }),
            NodalField::sample(g, [&](Vec2 p) { return U(p).y; }), true};
  }
  if (topology == Topology::periodic) return solve_cell_problem(s, options, info);
  NodalField u1 = solve_dirichlet(s, [&](Vec2 p) { return boundary(p).x; }, options, info);
  NodalField u2 = solve_dirichlet(s, [&](Vec2 p) { return boundary(p).y; }, options, info);
  return {std::move(u1), std::move(u2), true};
}

double CaseBundle::tolerance(int n) const {
  static const std::set<std::string> exact_cases = {"identity", "hypocycloid", "laminate", "constant_nonsymmetric"};
  if (exact_cases.contains(name)) return 1e-9;
  const double h = domain.width() / n;
  return 10.0 * h * h;
}

}  // namespace sqc
