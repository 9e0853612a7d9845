#include "lipnorm/harness.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "lipnorm/error.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/summing.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm::harness {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr double kOverlapTol = 1e-9;

// Distinct stream per check and trial.
unsigned long long trial_seed(unsigned long long seed, int check, int trial) {
  Rng r = make_rng(seed, static_cast<unsigned long long>(check) * 1000003ULL +
                             static_cast<unsigned long long>(trial));
  return r();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool too_wide(const NormEstimate& e) { return e.relative_width() > kSearchRelWidth; }

// Re-verifies every certificate; a failed certificate turns the verdict into
// a failure whatever the relation says.
void seal(CheckReport& r) {
  for (const auto& b : r.brackets) r.certificates.merge(verify_estimate(b.estimate, b.subject));
  if (!r.certificates.ok) {
    r.verdict = Verdict::Fail;
    r.note += (r.note.empty() ? "" : "; ") + std::string("certificate re-verification failed");
  }
}

template <class F>
std::vector<CheckReport> run_trials(int trials, int threads, F&& body) {
  std::vector<CheckReport> out(static_cast<std::size_t>(std::max(trials, 0)));
  parallel_for(trials, threads, [&](int t) {
    CheckReport r = body(t);
    r.trial = t;
    seal(r);
    out[static_cast<std::size_t>(t)] = std::move(r);
  });
  return out;
}

SummingOptions summing_options(unsigned long long seed) {
  SummingOptions o;
  o.seed = seed;
  o.restarts = 16;
  o.tensor.seed = seed;
  return o;
}

TensorOptions tensor_options(unsigned long long seed) {
  TensorOptions o;
  o.seed = seed;
  return o;
}

}  // namespace

// ------------------------------------------------------------------ isometry

std::vector<CheckReport> check_linearization_isometry(const CheckOptions& o) {
  if (o.min_size < 1 || o.max_size < o.min_size) throw InputError("bad size range");
  return run_trials(o.trials, o.threads, [&](int t) {
    CheckReport r;
    r.check = "isometry";
    r.seed = trial_seed(o.seed, 1, t);
    Rng rng = make_rng(r.seed);
    const int n = instances::uniform_int(rng, o.min_size, o.max_size);
    const int k = instances::uniform_int(rng, 1, 4);
    const Exponent q = std::array{Exponent::finite(1.0), Exponent::finite(2.0),
                                  Exponent::infinity()}[static_cast<std::size_t>(
        instances::uniform_int(rng, 0, 2))];
    const SpaceRef X = instances::random_space(rng, n);
    const FinNormedSpace E(k, q);
    const LipschitzMap T = t == 0 ? LipschitzMap::zero(X, E) : instances::random_map(rng, X, E);
    r.instance = "|X|=" + std::to_string(n) + ", E=l_" + q.to_string() + "^" + std::to_string(k) +
                 (t == 0 ? ", zero map" : "");
    r.relation = "op(linearize(T)) = Lip(T) to 1e-9";
    const LinearOperator lin = linearize(T);
    const NormEstimate op = op_norm(lin);
    const NormEstimate lip = T.lip_estimate();
    r.brackets = {{"op", op, subject_json(lin)}, {"lip", lip, subject_json(T)}};
    const double gap = std::abs(op.upper - lip.upper);
    r.measures = {{"abs_gap", gap}};
    r.verdict = op.exact && lip.exact && gap <= kExactTol * std::max(1.0, lip.upper)
                    ? Verdict::Pass
                    : Verdict::Fail;
    return r;
  });
}

// ------------------------------------------------------------------- thm35

std::vector<CheckReport> check_pairing_form(const CheckOptions& o) {
  return run_trials(o.trials, o.threads, [&](int t) {
    CheckReport r;
    r.check = "thm35";
    r.seed = trial_seed(o.seed, 2, t);
    Rng rng = make_rng(r.seed);
    const int n = instances::uniform_int(rng, 3, 4);
    const int k = instances::uniform_int(rng, 2, 3);
    const SpaceRef X = instances::random_space(rng, n);
    const FinNormedSpace E(k, Exponent::finite(2.0));
    const bool rank_one = t % 10 == 1;
    LipschitzMap T = instances::random_map(rng, X, E);
    if (rank_one) {
      // f(x) e for a random functional f.
      const Vector f = gaussian_vector(rng, X->free_dim());
      const Vector e = gaussian_vector(rng, k);
      T = LipschitzMap::rank_one(LipschitzFunctional::from_coords(X, f), e, E);
    }
    if (t == 0) T = LipschitzMap::zero(X, E);
    r.instance = "|X|=" + std::to_string(n) + ", E=l_2^" + std::to_string(k) +
                 (t == 0 ? ", zero map" : rank_one ? ", rank one" : "");
    r.relation = "PiSL_p(T) = Pi_p(T^); pairing ratio >= 0.9 Pi_p(T^) lower and <= upper + 1e-6";
    const SummingOptions so = summing_options(r.seed);
    const LinearOperator lin = linearize(T);
    const NormEstimate pi = pi_norm(lin, o.p, so);
    const NormEstimate sl = strictly_lip_p_summing_norm(T, o.p, so);
    r.brackets = {{"Pi(T^)", pi, subject_json(lin)}, {"PiSL(T)", sl, subject_json(T)}};
    if (pi.upper == 0.0) {
      r.measures = {{"pairing_ratio", 0.0}};
      r.verdict = sl.upper == 0.0 ? Verdict::Pass : Verdict::Fail;
      return r;
    }
    const PairingWitness w =
        sl_pairing_witness(T, o.p, witness_sequence(pi, lin.domain_dim()), tensor_options(r.seed));
    r.brackets.push_back({"d_p(u)", w.dp, subject_json(w.tensor)});
    r.measures = {{"pairing", w.pairing}, {"pairing_ratio", w.ratio},
                  {"ratio_over_lower", w.ratio / pi.lower}};
    const bool same = pi.overlaps(sl, kOverlapTol);
    const bool reach = w.ratio >= 0.9 * pi.lower;
    const bool below = w.ratio <= pi.upper + 1e-6;
    const bool exact_ok = !rank_one || pi.relative_width() <= kExactTol;
    if (same && reach && below && exact_ok) {
      r.verdict = Verdict::Pass;
    } else if (below && same && (too_wide(pi) || too_wide(w.dp))) {
      r.verdict = Verdict::Inconclusive;
    } else {
      r.verdict = Verdict::Fail;
    }
    if (!reach) r.note = "pairing ratio below 90% of the lower bound";
    if (!below) r.note = "pairing ratio exceeds the certified upper bound";
    if (!exact_ok) r.note = "rank-one bracket not exact";
    return r;
  });
}

// ------------------------------------------------------------------- cor314

std::vector<CheckReport> check_mu_g_agreement(const CheckOptions& o) {
  return run_trials(o.trials, o.threads, [&](int t) {
    CheckReport r;
    r.check = "cor314";
    r.seed = trial_seed(o.seed, 3, t);
    Rng rng = make_rng(r.seed);
    const SpaceRef X = instances::random_space(rng, 3);
    const FinNormedSpace E(2, Exponent::finite(2.0));
    const bool single = t % 10 == 1;
    TensorElement u = instances::random_tensor(rng, X, E, single ? 1 : 2);
    if (t == 0) u = u * 0.0;
    r.instance = "|X|=3, E=l_2^2, " + std::string(t == 0 ? "zero tensor" : single ? "1 term" : "2 terms");
    r.relation = "mu_p(u) = g_p^L(u); g_p value of the mu_p representation <= mu_p upper";
    const TensorOptions to = tensor_options(r.seed);
    const NormEstimate mu = mu_norm(u, o.p, to);
    const NormEstimate g = gp_norm_l(u, o.p, to);
    r.brackets = {{"mu", mu, subject_json(u)}, {"gL", g, subject_json(u)}};

    // A molecule representation is a general one: its g_p value must not
    // exceed the mu_p value it certifies.
    double g_of_mu = 0.0;
    if (mu.upper_cert.value("type", "") == "molecule_rep") {
      // s copies of delta [x] E/s are one term (s^(1/p*) delta) [x] (s^(-1/p*) E)
      // for the g objective as well.
      const Json& c = mu.upper_cert;
      const Vector mult = parse_vector(c.at("multiplicity"));
      const Matrix vecs = parse_columns(c.at("vectors"), E.dim());
      const Exponent q = o.p.conjugate();
      Matrix left = Matrix::Zero(X->free_dim(), mult.size());
      Matrix right = Matrix::Zero(E.dim(), mult.size());
      for (Eigen::Index i = 0; i < mult.size(); ++i) {
        if (!(mult(i) > 0.0)) continue;
        const double k = q.is_infinite() ? 1.0 : std::pow(mult(i), 1.0 / q.value());
        const auto x = X->index_of(c.at("pairs")[static_cast<std::size_t>(i)].at(0));
        const auto y = X->index_of(c.at("pairs")[static_cast<std::size_t>(i)].at(1));
        if (X->coord(x) >= 0) left(X->coord(x), i) = k;
        if (X->coord(y) >= 0) left(X->coord(y), i) = -k;
        right.col(i) = vecs.col(i) / k;
      }
      g_of_mu = rep_value(CrossNorm::Gp, LipBall(X), E, left, right, o.p);
    }
    r.measures = {{"mu_width", mu.relative_width()}, {"g_width", g.relative_width()},
                  {"g_of_mu_rep", g_of_mu}};
    if (single && u.terms().size() == 1) {
      const auto& term = u.terms().front();
      const double expect = X->distance(term.x, term.y) * E.norm(term.e);
      r.measures.emplace_back("d_times_norm", expect);
      const bool eq = std::abs(mu.upper - expect) <= 1e-6 * std::max(1.0, expect) &&
                      std::abs(g.upper - expect) <= 1e-6 * std::max(1.0, expect) &&
                      mu.contains(expect, 1e-6) && g.contains(expect, 1e-6);
      r.verdict = eq ? Verdict::Pass : Verdict::Fail;
      return r;
    }
    const bool overlap = mu.overlaps(g, kOverlapTol);
    const bool chain = g_of_mu <= mu.upper * (1.0 + 1e-9) + 1e-12;
    if (!overlap || !chain) {
      r.verdict = Verdict::Fail;
    } else if (too_wide(mu) || too_wide(g)) {
      r.verdict = Verdict::Inconclusive;
    } else {
      r.verdict = Verdict::Pass;
    }
    return r;
  });
}

// ------------------------------------------------------------------- prop38

std::vector<CheckReport> check_beta_monotone(const CheckOptions& o) {
  return run_trials(o.trials, o.threads, [&](int t) {
    CheckReport r;
    r.check = "prop38";
    r.seed = trial_seed(o.seed, 4, t);
    Rng rng = make_rng(r.seed);
    const Exponent two = Exponent::finite(2.0);
    const FinNormedSpace l3(3, two);
    const int n = instances::uniform_int(rng, 3, 6);
    const int k = instances::uniform_int(rng, 1, 3);
    const FinNormedSpace G(k, two);
    Matrix pts = instances::gaussian_points(rng, n, 3);
    Matrix A = gaussian_matrix(rng, k, 3);
    if (t == 0) A.setZero();
    const auto X = share(PointedMetricSpace::from_points(pts, two));
    r.instance = "|X|=" + std::to_string(n) + " in l_2^3, T: l_2^3 -> l_2^" + std::to_string(k) +
                 (t == 0 ? ", zero map" : "");
    r.relation = "Pi_p(T o beta_X) <= Pi_p(T) + 1e-6; PiL(T|X) <= PiSL(T|X) = Pi_p(T o beta_X)";
    const SummingOptions so = summing_options(r.seed);
    const LinearOperator full = LinearOperator::on_normed(l3, G, A);
    const LinearOperator hat = beta_map(X, pts, l3).followed_by(A, G);
    const LipschitzMap T(X, G, A * pts);
    const NormEstimate pf = pi_norm(full, o.p, so);
    const NormEstimate ph = pi_norm(hat, o.p, so);
    const NormEstimate sl = strictly_lip_p_summing_norm(T, o.p, so);
    const NormEstimate pl = lip_p_summing_norm(T, o.p, so);
    r.brackets = {{"Pi(T)", pf, subject_json(full)},
                  {"Pi(T o beta)", ph, subject_json(hat)},
                  {"PiSL(T|X)", sl, subject_json(T)},
                  {"PiL(T|X)", pl, subject_json(T)}};
    const bool monotone = ph.upper <= pf.upper + 1e-6;
    const bool sl_eq = ph.overlaps(sl, kOverlapTol);
    const bool chain = pl.lower <= sl.upper * (1.0 + kOverlapTol) + kOverlapTol;
    const bool three = pf.overlaps(sl, kOverlapTol) && pl.overlaps(sl, kOverlapTol);
    const bool l_sl = pl.overlaps(sl, kOverlapTol);
    r.measures = {{"hat_over_full", pf.upper > 0 ? ph.upper / pf.upper : 0.0},
                  {"L_over_SL", sl.upper > 0 ? pl.upper / sl.upper : 0.0},
                  {"L_SL_overlap", l_sl ? 1.0 : 0.0},
                  {"three_way_overlap", three ? 1.0 : 0.0}};
    if (!(monotone && sl_eq && chain)) {
      r.verdict = Verdict::Fail;
      r.note = !monotone ? "Pi(T o beta) exceeds Pi(T)" : !sl_eq ? "PiSL differs from Pi(T^)" : "PiL exceeds PiSL";
    } else if (too_wide(ph) || too_wide(pl)) {
      r.verdict = Verdict::Inconclusive;
    } else {
      r.verdict = Verdict::Pass;
    }
    return r;
  });
}

// -------------------------------------------------------------------- cor37

std::vector<CheckReport> scan_dirac_growth(int n_min, int n_max, const CheckOptions& o) {
  if (n_min < 1 || n_max < n_min) throw InputError("bad range for the growth scan");
  const int count = n_max - n_min + 1;
  std::vector<CheckReport> out = run_trials(count, o.threads, [&](int t) {
    const int n = n_min + t;
    CheckReport r;
    r.check = "cor37";
    r.seed = trial_seed(o.seed, 5, t);
    const SpaceRef X = instances::line_space(n);
    const LipschitzMap delta = LipschitzMap::dirac(X);
    const SummingOptions so = summing_options(r.seed);
    const NormEstimate sl = strictly_lip_p_summing_norm(delta, o.p, so);
    const NormEstimate pl = lip_p_summing_norm(delta, o.p, so);
    r.instance = "X_" + std::to_string(n) + " = {0,...," + std::to_string(n) + "}, delta_X";
    r.brackets = {{"PiSL(delta)", sl, subject_json(delta)}, {"PiL(delta)", pl, subject_json(delta)}};
    r.measures = {{"n", static_cast<double>(n)},
                  {"sl_lower", sl.lower},
                  {"l_upper", pl.upper},
                  {"ratio", pl.upper > 0 ? sl.lower / pl.upper : 0.0}};
    return r;
  });
  // Monotonicity is a property of the sweep, judged in order.
  double prev_sl = -1.0, prev_ratio = -1.0;
  for (auto& r : out) {
    const double n = r.measures[0].second, sl = r.measures[1].second, cap = r.measures[2].second,
                 ratio = r.measures[3].second;
    r.relation = "PiL upper <= " + fmt(kDiracGrowthCap) + "; PiSL lower strictly increasing in n" +
                 std::string(n == 4 && o.p.is(2.0) ? "; PiSL lower >= 1.8 at n = 4" : "");
    bool ok = cap <= kDiracGrowthCap && sl > prev_sl && ratio > prev_ratio;
    if (n == 4 && o.p.is(2.0)) ok = ok && sl >= 1.8;
    if (n == 1) ok = ok && std::abs(sl - 1.0) <= 1e-9 && std::abs(cap - 1.0) <= 1e-9;
    r.verdict = ok && r.certificates.ok ? Verdict::Pass : Verdict::Fail;
    prev_sl = sl;
    prev_ratio = ratio;
  }
  return out;
}

// ------------------------------------------------------------------ reports

bool Summary::ok() const {
  const int total = pass + fail + inconclusive;
  return fail == 0 && 10 * inconclusive <= total;
}

Summary summarize(const std::vector<CheckReport>& reports) {
  Summary s;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Pass) ++s.pass;
    if (r.verdict == Verdict::Fail) ++s.fail;
    if (r.verdict == Verdict::Inconclusive) ++s.inconclusive;
  }
  return s;
}

std::vector<CheckReport> run_suite(const std::string& suite, const CheckOptions& o) {
  std::vector<CheckReport> out;
  auto add = [&](std::vector<CheckReport> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "isometry") { add(check_linearization_isometry(o)); known = true; }
  if (all || suite == "thm35") { add(check_pairing_form(o)); known = true; }
  if (all || suite == "cor314") { add(check_mu_g_agreement(o)); known = true; }
  if (all || suite == "prop38") { add(check_beta_monotone(o)); known = true; }
  if (all || suite == "cor37") { add(scan_dirac_growth(1, 5, o)); known = true; }
  if (!known) {
    throw InputError("unknown suite '" + suite + "' (expected isometry, thm35, cor314, prop38, cor37 or all)");
  }
  return out;
}

namespace {

// Per-check summary, judged separately so one check's inconclusive share
// does not hide behind another's passes.
std::map<std::string, Summary> by_check(const std::vector<CheckReport>& reports) {
  std::map<std::string, Summary> m;
  for (const auto& r : reports) {
    Summary& s = m[r.check];
    if (r.verdict == Verdict::Pass) ++s.pass;
    if (r.verdict == Verdict::Fail) ++s.fail;
    if (r.verdict == Verdict::Inconclusive) ++s.inconclusive;
  }
  return m;
}

}  // namespace

bool suite_ok(const std::vector<CheckReport>& reports) {
  for (const auto& [name, s] : by_check(reports)) {
    if (!s.ok()) return false;
  }
  return true;
}

Json report_json(const std::vector<CheckReport>& reports, const Json& config) {
  Json checks = Json::array();
  for (const auto& r : reports) {
    Json b = Json::array();
    for (const auto& br : r.brackets) {
      b.push_back({{"name", br.name}, {"estimate", to_json(br.estimate)}, {"subject", br.subject}});
    }
    Json m = Json::array();
    for (const auto& [k, v] : r.measures) m.push_back({{"name", k}, {"value", v}});
    checks.push_back({{"check", r.check},
                      {"trial", r.trial},
                      {"seed", std::to_string(r.seed)},
                      {"instance", r.instance},
                      {"relation", r.relation},
                      {"verdict", to_string(r.verdict)},
                      {"note", r.note},
                      {"brackets", b},
                      {"measures", m},
                      {"certificates", {{"checked", r.certificates.checked},
                                        {"ok", r.certificates.ok},
                                        {"max_residual", r.certificates.residual},
                                        {"failures", r.certificates.failures}}}});
  }
  Json summary = Json::object();
  for (const auto& [name, s] : by_check(reports)) {
    summary[name] = {{"pass", s.pass}, {"fail", s.fail}, {"inconclusive", s.inconclusive}, {"ok", s.ok()}};
  }
  return {{"config", config}, {"checks", checks}, {"summary", summary}, {"ok", suite_ok(reports)}};
}

std::string report_text(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    std::string verdict = to_string(r.verdict);
    std::transform(verdict.begin(), verdict.end(), verdict.begin(), [](unsigned char c) { return std::toupper(c); });
    out << "[" << verdict << "] " << r.check << " #" << r.trial << " (" << r.instance << ")\n";
    out << "    relation: " << r.relation << "\n";
    for (const auto& b : r.brackets) {
      out << "    " << b.name << " in [" << fmt(b.estimate.lower) << ", " << fmt(b.estimate.upper) << "]"
          << (b.estimate.exact ? " exact" : "") << (b.estimate.loose ? " loose" : "") << "\n";
    }
    for (const auto& [k, v] : r.measures) out << "    " << k << " = " << fmt(v) << "\n";
    out << "    certificates: " << r.certificates.checked << " checked, max residual "
        << fmt(r.certificates.residual) << "\n";
    if (!r.note.empty()) out << "    note: " << r.note << "\n";
  }
  for (const auto& [name, s] : by_check(reports)) {
    out << name << ": " << s.pass << " pass, " << s.fail << " fail, " << s.inconclusive
        << " inconclusive -> " << (s.ok() ? "OK" : "FAILED") << "\n";
  }
  return out.str();
}

std::string report_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  out << "check,trial,seed,verdict,bracket,lower,upper,exact,loose\n";
  for (const auto& r : reports) {
    for (const auto& b : r.brackets) {
      out << r.check << "," << r.trial << "," << r.seed << "," << to_string(r.verdict) << ","
          << '"' << b.name << '"' << "," << fmt(b.estimate.lower) << "," << fmt(b.estimate.upper) << ","
          << (b.estimate.exact ? 1 : 0) << "," << (b.estimate.loose ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

}  // namespace lipnorm::harness
