#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "lipnorm/certify.hpp"
#include "lipnorm/error.hpp"
#include "lipnorm/free_space.hpp"
#include "lipnorm/harness.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/summing.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm::cli {
namespace {

struct Config {
  unsigned long long seed = kDefaultSeed;
  int restarts = 64;
  int threads = 1;
  int max_rounds = 200;
  int stall_rounds = 5;
  double stall_improvement = 1e-7;
};

Json config_json(const Config& c) {
  return {{"seed", std::to_string(c.seed)},
          {"restarts", c.restarts},
          {"threads", c.threads},
          {"cutting_plane",
           {{"max_rounds", c.max_rounds},
            {"stall_rounds", c.stall_rounds},
            {"stall_improvement", c.stall_improvement}}},
          {"tolerances",
           {{"metric", kMetricTol},
            {"exact", kExactTol},
            {"search_relative_width", kSearchRelWidth},
            {"certify", kCertifyTol}}},
          {"caps",
           {{"lip_ball_points", kMaxVertexPoints},
            {"sign_vector_dim", kMaxEnumerationDim},
            {"sequence_length", "4 * dim"}}}};
}

Json envelope(const std::string& command, const Config& c) {
  return {{"tool", "lipnorm"}, {"version", LIPNORM_VERSION}, {"command", command}, {"config", config_json(c)}};
}

SummingOptions summing_options(const Config& c) {
  SummingOptions o;
  o.seed = c.seed;
  o.restarts = c.restarts;
  o.threads = c.threads;
  o.cutting_plane.max_rounds = c.max_rounds;
  o.cutting_plane.stall_rounds = c.stall_rounds;
  o.cutting_plane.stall_improvement = c.stall_improvement;
  o.tensor.seed = c.seed;
  o.tensor.threads = c.threads;
  return o;
}

TensorOptions tensor_options(const Config& c) {
  TensorOptions o;
  o.seed = c.seed;
  o.restarts = c.restarts;
  o.threads = c.threads;
  return o;
}

const char* kind_name(MetricViolation::Kind k) {
  switch (k) {
    case MetricViolation::Kind::Diagonal: return "diagonal";
    case MetricViolation::Kind::Symmetry: return "symmetry";
    case MetricViolation::Kind::Positivity: return "positivity";
    case MetricViolation::Kind::Triangle: return "triangle";
  }
  return "?";
}

bool is_map(const Json& j) { return j.is_object() && j.contains("values"); }

// Every object carrying both an estimate and its subject, in document order.
void collect_estimates(const Json& j, std::vector<std::pair<const Json*, const Json*>>& found) {
  if (j.is_object()) {
    if (j.contains("estimate") && j.contains("subject")) {
      found.emplace_back(&j.at("estimate"), &j.at("subject"));
      return;
    }
    for (const auto& [k, v] : j.items()) collect_estimates(v, found);
  } else if (j.is_array()) {
    for (const auto& v : j) collect_estimates(v, found);
  }
}

class Tool {
 public:
  Tool(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Lipschitz operator and tensor norms with certified brackets", "lipnorm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(LIPNORM_VERSION));
    app.fallthrough();
    std::optional<unsigned long long> seed_flag;
    app.add_option("--seed", seed_flag, "Random seed (overrides LIPNORM_SEED)");
    app.add_option("--restarts", cfg_.restarts, "Seeded restarts per search")->check(CLI::PositiveNumber);
    app.add_option("--threads", cfg_.threads, "Worker thread cap")->check(CLI::PositiveNumber);
    app.add_option("--max-rounds", cfg_.max_rounds, "Cutting-plane round limit")->check(CLI::PositiveNumber);
    app.add_option("--stall-rounds", cfg_.stall_rounds, "Cutting-plane stall window")->check(CLI::PositiveNumber);
    app.add_option("--stall-improvement", cfg_.stall_improvement, "Relative progress below which a round stalls")
        ->check(CLI::NonNegativeNumber);

    std::string path, path2, kind, p_text = "2", suite = "all", csv_path, format = "json";
    int trials = 30;

    auto* validate = app.add_subcommand("validate", "Check the metric axioms of a space");
    validate->add_option("space", path, "space.json")->required();

    auto* aenorm = app.add_subcommand("aenorm", "Arens-Eells norm of a free-space vector");
    aenorm->add_option("space", path, "space.json")->required();
    aenorm->add_option("vector", path2, "vector.json")->required();

    auto* lip = app.add_subcommand("lip", "Lipschitz constant of a map");
    lip->add_option("map", path, "map.json")->required();

    auto* linearize_cmd = app.add_subcommand("linearize", "Matrix of the linearization on F(X)");
    linearize_cmd->add_option("map", path, "map.json")->required();

    auto* norm = app.add_subcommand("norm", "Operator or Lipschitz summing norm");
    norm->add_option("--kind", kind, "Norm kind")
        ->required()
        ->check(CLI::IsMember({"op", "pi", "dp", "pisl", "pil", "dpl"}));
    norm->add_option("--p", p_text, "Exponent (number or inf)");
    norm->add_option("operand", path, "operator.json or map.json")->required();

    auto* cross = app.add_subcommand("crossnorm", "Lipschitz tensor norm");
    cross->add_option("--kind", kind, "Norm kind")
        ->required()
        ->check(CLI::IsMember({"piL", "epsL", "dpL", "gpL", "mu", "cs"}));
    cross->add_option("--p", p_text, "Exponent (number or inf)");
    cross->add_option("tensor", path, "tensor.json")->required();

    auto* check = app.add_subcommand("check", "Run the property harness");
    check->add_option("--suite", suite, "Suite")
        ->check(CLI::IsMember({"isometry", "thm35", "cor314", "prop38", "cor37", "all"}));
    check->add_option("--trials", trials, "Trials per check")->check(CLI::PositiveNumber);
    check->add_option("--p", p_text, "Exponent (number or inf)");
    check->add_option("--csv", csv_path, "Also write a CSV sweep to this file");
    check->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));

    auto* certify = app.add_subcommand("certify", "Re-verify stored certificates");
    certify->add_option("estimate", path, "estimate.json or a check report")->required();

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp& e) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::CallForVersion& e) {
      out_ << LIPNORM_VERSION << "\n";
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "lipnorm: " << e.what() << "\n";
      return kInputError;
    }

    if (seed_flag) {
      cfg_.seed = *seed_flag;
    } else if (const char* env = std::getenv("LIPNORM_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        cfg_.seed = std::stoull(env, &used, 0);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        err_ << "lipnorm: LIPNORM_SEED='" << env << "' is not an unsigned integer\n";
        return kInputError;
      }
    }

    try {
      if (*validate) return cmd_validate(path);
      if (*aenorm) return cmd_aenorm(path, path2);
      if (*lip) return cmd_lip(path);
      if (*linearize_cmd) return cmd_linearize(path);
      if (*norm) return cmd_norm(kind, Exponent::parse(p_text), path);
      if (*cross) return cmd_crossnorm(kind, Exponent::parse(p_text), path);
      if (*check) return cmd_check(suite, trials, Exponent::parse(p_text), csv_path, format);
      if (*certify) return cmd_certify(path);
    } catch (const CapacityError& e) {
      err_ << "lipnorm: capacity exceeded: " << e.what() << "\n";
      return kCapacityError;
    } catch (const InputError& e) {
      err_ << "lipnorm: input error: " << e.what() << "\n";
      return kInputError;
    } catch (const Json::exception& e) {
      err_ << "lipnorm: input error: " << e.what() << "\n";
      return kInputError;
    } catch (const std::exception& e) {
      err_ << "lipnorm: internal error: " << e.what() << "\n";
      return kCheckFailed;
    }
    return kInputError;
  }

 private:
  void emit(const Json& j) { out_ << dump_deterministic(j) << "\n"; }

  int cmd_validate(const std::string& path) {
    const Json j = read_json_file(path);
    if (!j.is_object() || !j.contains("points") || !j.contains("dist") || !j["points"].is_array()) {
      throw InputError("'" + path + "': expected an object with \"points\" and \"dist\"");
    }
    const auto n = j["points"].size();
    const Matrix dist = parse_rows(j["dist"], static_cast<Eigen::Index>(n));
    const auto violations = validate_metric(dist, n);
    Json v = Json::array();
    for (const auto& m : violations) {
      Json e = {{"kind", kind_name(m.kind)}, {"i", m.i}, {"j", m.j}, {"slack", m.slack},
                {"description", m.describe()}};
      if (m.kind == MetricViolation::Kind::Triangle) e["k"] = m.k;
      v.push_back(e);
    }
    Json r = envelope("validate", cfg_);
    r["points"] = n;
    r["valid"] = violations.empty();
    r["violations"] = v;
    if (violations.empty()) parse_space(j);  // also checks names and base
    emit(r);
    return violations.empty() ? kOk : kCheckFailed;
  }

  int cmd_aenorm(const std::string& space_path, const std::string& vector_path) {
    Json space = read_json_file(space_path);
    Json vec = read_json_file(vector_path);
    if (vec.is_object() && !vec.contains("space")) vec["space"] = space;
    if (!vec.is_object() || !vec.contains("coeffs")) {
      throw InputError("'" + vector_path + "': expected an object with \"coeffs\"");
    }
    const FreeVector m = parse_free_vector(vec);
    const AeNormResult primal = ae_norm(m);
    const KrDualResult dual = ae_dual_norm(m);
    Json r = envelope("aenorm", cfg_);
    r["estimate"] = to_json(primal.estimate);
    r["subject"] = subject_json(m);
    r["dual_value"] = dual.value;
    emit(r);
    return kOk;
  }

  int cmd_lip(const std::string& path) {
    const LipschitzMap T = parse_lipschitz_map(read_json_file(path));
    Json r = envelope("lip", cfg_);
    r["estimate"] = to_json(T.lip_estimate());
    r["subject"] = subject_json(T);
    emit(r);
    return kOk;
  }

  int cmd_linearize(const std::string& path) {
    const LipschitzMap T = parse_lipschitz_map(read_json_file(path));
    Json r = envelope("linearize", cfg_);
    r["operator"] = operator_json(linearize(T));
    emit(r);
    return kOk;
  }

  int cmd_norm(const std::string& kind, Exponent p, const std::string& path) {
    const Json j = read_json_file(path);
    const SummingOptions o = summing_options(cfg_);
    Json r = envelope("norm", cfg_);
    r["kind"] = kind;
    r["p"] = p.to_string();
    NormEstimate e;
    if (kind == "op" || kind == "pi" || kind == "dp") {
      const LinearOperator u = is_map(j) ? linearize(parse_lipschitz_map(j)) : parse_operator(j);
      if (kind == "op") e = op_norm(u);
      if (kind == "pi") e = pi_norm(u, p, o);
      if (kind == "dp") e = strongly_p_summing_norm(u, p, o);
      r["subject"] = subject_json(u);
    } else {
      if (!is_map(j)) throw InputError("'" + path + "': --kind " + kind + " needs a Lipschitz map");
      const LipschitzMap T = parse_lipschitz_map(j);
      if (kind == "pisl") e = strictly_lip_p_summing_norm(T, p, o);
      if (kind == "pil") e = lip_p_summing_norm(T, p, o);
      if (kind == "dpl") e = lip_cohen_strongly_p_summing_norm(T, p, o);
      r["subject"] = subject_json(T);
    }
    r["estimate"] = to_json(e);
    emit(r);
    return kOk;
  }

  int cmd_crossnorm(const std::string& kind, Exponent p, const std::string& path) {
    const TensorElement u = parse_tensor(read_json_file(path));
    const TensorOptions o = tensor_options(cfg_);
    NormEstimate e;
    if (kind == "piL") e = proj_norm_l(u, o);
    if (kind == "epsL") e = inj_norm_l(u, o);
    if (kind == "dpL") e = dp_norm_l(u, p, o);
    if (kind == "gpL") e = gp_norm_l(u, p, o);
    if (kind == "mu") e = mu_norm(u, p, o);
    if (kind == "cs") e = cs_norm(u, p, o);
    Json r = envelope("crossnorm", cfg_);
    r["kind"] = kind;
    r["p"] = p.to_string();
    r["estimate"] = to_json(e);
    r["subject"] = subject_json(u);
    emit(r);
    return kOk;
  }

  int cmd_check(const std::string& suite, int trials, Exponent p, const std::string& csv_path,
                const std::string& format) {
    harness::CheckOptions o;
    o.trials = trials;
    o.seed = cfg_.seed;
    o.threads = cfg_.threads;
    o.p = p;
    const auto reports = harness::run_suite(suite, o);
    Json config = envelope("check", cfg_);
    config["suite"] = suite;
    config["trials"] = trials;
    config["p"] = p.to_string();
    if (format == "text") {
      out_ << harness::report_text(reports);
    } else {
      emit(harness::report_json(reports, config));
    }
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (!csv) throw InputError("cannot write '" + csv_path + "'");
      csv << harness::report_csv(reports);
    }
    return harness::suite_ok(reports) ? kOk : kCheckFailed;
  }

  int cmd_certify(const std::string& path) {
    const Json j = read_json_file(path);
    std::vector<std::pair<const Json*, const Json*>> found;
    collect_estimates(j, found);
    if (found.empty()) throw InputError("'" + path + "' holds no {estimate, subject} pair");
    CertificateCheck total;
    Json items = Json::array();
    for (const auto& [est, subj] : found) {
      const CertificateCheck c = verify_estimate(estimate_from_json(*est), *subj);
      items.push_back({{"quantity", est->value("quantity", "")},
                       {"ok", c.ok},
                       {"residual", c.residual},
                       {"failures", c.failures}});
      total.merge(c);
    }
    Json r = envelope("certify", cfg_);
    r["estimates"] = found.size();
    r["certificates_checked"] = total.checked;
    r["max_residual"] = total.residual;
    r["ok"] = total.ok;
    r["results"] = items;
    emit(r);
    return total.ok ? kOk : kCheckFailed;
  }

  std::ostream& out_;
  std::ostream& err_;
  Config cfg_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Tool(out, err).run(args);
}

}  // namespace lipnorm::cli
