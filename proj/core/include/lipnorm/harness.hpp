#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lipnorm/certify.hpp"
#include "lipnorm/estimate.hpp"
#include "lipnorm/exponent.hpp"
#include "lipnorm/optim.hpp"

namespace lipnorm::harness {

enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

/// A measured bracket together with the object it was computed for, so the
/// certificates can be re-verified from the report alone.
struct Bracket {
  std::string name;
  NormEstimate estimate;
  Json subject;
};

struct CheckReport {
  std::string check;
  int trial = 0;
  unsigned long long seed = 0;
  std::string instance;
  std::string relation;
  std::vector<Bracket> brackets;
  /// Derived numbers the verdict rests on (ratios, gaps), in a fixed order.
  std::vector<std::pair<std::string, double>> measures;
  Verdict verdict = Verdict::Fail;
  std::string note;
  CertificateCheck certificates;
};

struct CheckOptions {
  int trials = 30;
  unsigned long long seed = kDefaultSeed;
  Exponent p = Exponent::finite(2.0);
  int threads = 1;
  /// Inclusive range of |X| for the isometry check.
  int min_size = 2;
  int max_size = 10;
};

/// opNorm(linearize(T)) = Lip(T) to 1e-9 on random maps.
std::vector<CheckReport> check_linearization_isometry(const CheckOptions& options);

/// Pi_2^SL(T) equals Pi_2(T^) and the pairing witness built from the
/// Pi_2 lower witness reaches at least 90% of that lower bound.
std::vector<CheckReport> check_pairing_form(const CheckOptions& options);

/// mu_p and g_p^L brackets overlap on random 2-term tensors over 3-point
/// spaces, and the mu_p representation is a g_p representation of no larger
/// value.
std::vector<CheckReport> check_mu_g_agreement(const CheckOptions& options);

/// For linear T on finite X in l_2^3: Pi_2(T o beta_X) <= Pi_2(T), with the
/// finite-subset chain Pi_2^L(T|X) <= Pi_2^SL(T|X) = Pi_2(T o beta_X).
std::vector<CheckReport> check_beta_monotone(const CheckOptions& options);

/// delta_X on X_n = {0, ..., n}: Pi_p^SL lower grows strictly in n while
/// Pi_p^L upper stays below a fixed cap. `options.trials` is ignored.
std::vector<CheckReport> scan_dirac_growth(int n_min, int n_max, const CheckOptions& options);

/// The cap on Pi_p^L(delta_X) used by the scan.
inline constexpr double kDiracGrowthCap = 1.0 + 1e-6;

struct Summary {
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;
  /// No failures and at most 10% inconclusive.
  bool ok() const;
};

Summary summarize(const std::vector<CheckReport>& reports);

/// Every check id passes on its own: no failures and at most 10% inconclusive.
bool suite_ok(const std::vector<CheckReport>& reports);

/// Suites: isometry, thm35, cor314, prop38, cor37, all.
std::vector<CheckReport> run_suite(const std::string& suite, const CheckOptions& options);

Json report_json(const std::vector<CheckReport>& reports, const Json& config);
std::string report_text(const std::vector<CheckReport>& reports);
std::string report_csv(const std::vector<CheckReport>& reports);

}  // namespace lipnorm::harness
