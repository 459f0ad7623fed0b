// Command-line front end: solve, classify, bounds, eval.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ezdp.hpp"
#include "ezdp/io.hpp"

namespace {

using ezdp::io::json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kUnsupported = 3,
  kNonConvergence = 4,
  kBoundary = 5,
  kAudit = 6,
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write '" + out + "'");
  f << text;
}

json model_parameters(const ezdp::Mdp& m) {
  return {{"beta", m.beta()}, {"rho", m.rho()}, {"gamma", m.gamma()}, {"n_states", m.n_states()},
          {"n_actions", m.n_actions()}};
}

/// Maps library errors onto the documented exit codes.
template <class Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ezdp::ValidationError& e) {
    std::cerr << "validation error [" << ezdp::to_string(e.kind()) << "]: " << e.what() << '\n';
    return kValidation;
  } catch (const ezdp::NotAContraction& e) {
    std::cerr << "validation error [NotAContraction]: " << e.what() << '\n';
    return kValidation;
  } catch (const ezdp::UnsupportedCase& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const ezdp::MaxIterationsExceeded& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const ezdp::BoundaryConditionFails& e) {
    std::cerr << "boundary condition fails: " << e.what() << '\n';
    return kBoundary;
  } catch (const ezdp::OptimizationFailed& e) {
    std::cerr << "boundary optimization failed: " << e.what() << '\n';
    return kBoundary;
  } catch (const ezdp::AuditFailed& e) {
    std::cerr << "audit failed: " << e.what() << '\n';
    return kAudit;
  } catch (const ezdp::InfeasibleAction& e) {
    std::cerr << "validation error [InfeasibleAction]: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}

ezdp::Mdp load(const std::string& path) { return ezdp::validate(ezdp::io::load_model(path)); }

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string model;
  double tol = ezdp::kDefaultTolerance;
  std::size_t max_iter = ezdp::kDefaultMaxIterations;
  std::string out;
  std::string trace_csv;
};

int cmd_solve(const SolveArgs& a) {
  Stopwatch clock;
  const auto m = load(a.model);
  const auto rep = ezdp::solve(m, a.tol, a.max_iter);
  if (!a.trace_csv.empty()) {
    std::ofstream csv(a.trace_csv);
    if (!csv) throw std::runtime_error("cannot write '" + a.trace_csv + "'");
    ezdp::io::write_trace_csv(csv, rep.trace);
  }
  json params = model_parameters(m);
  params["tol"] = a.tol;
  params["max_iter"] = a.max_iter;
  emit(ezdp::io::run_report("solve", m.name(), params, ezdp::io::to_json(rep), clock.seconds()), a.out);
  return kOk;
}

int cmd_classify(const std::string& path) {
  const auto m = load(path);
  const auto tag = ezdp::classify(m.rho(), m.gamma());
  if (tag == ezdp::CaseClass::Unsupported) throw ezdp::UnsupportedCase(ezdp::describe_unsupported(m.rho(), m.gamma()));
  const auto d = ezdp::derive(m);
  std::cout.precision(17);
  std::cout << "case: " << ezdp::to_string(d.case_class);
  if (d.case_class == ezdp::CaseClass::ThetaOne)
    std::cout << " (routed to " << ezdp::to_string(d.machinery) << " machinery)";
  std::cout << '\n'
            << "operator: " << ezdp::to_string(ezdp::operator_kind(d).tag) << '\n'
            << "theta: " << d.theta << '\n'
            << "M: " << d.M << '\n'
            << "c: " << d.c << '\n'
            << "delta: " << d.delta << '\n';
  return kOk;
}

struct BoundsArgs {
  std::string model;
  int example = 0;
  std::string out;
};

int cmd_bounds(const BoundsArgs& a) {
  Stopwatch clock;
  if (a.example != 0) {
    if (a.example != 1 && a.example != 2) throw std::invalid_argument("--example must be 1 or 2");
    const auto profile = a.example == 1 ? ezdp::example1_profile() : ezdp::example2_profile();
    const auto rep = ezdp::du_optimize_rate(profile);
    json params{{"example", a.example},          {"kind", ezdp::to_string(profile.kind)},
                {"m", profile.m_low},            {"M", profile.M_high},
                {"minmax", profile.minmax},      {"maxmin", profile.maxmin},
                {"beta", profile.beta},          {"theta", profile.theta}};
    emit(ezdp::io::run_report("bounds", "example" + std::to_string(a.example), params, ezdp::io::to_json(rep),
                              clock.seconds()),
         a.out);
    std::cerr << "verdict: " << rep.winner << " (delta = " << rep.banach_delta << ", 1 - eps = " << rep.rate << ")\n";
    return kOk;
  }
  if (a.model.empty()) throw std::invalid_argument("bounds needs a model file or --example 1|2");
  const auto m = load(a.model);
  const auto d = ezdp::derive(m);
  const auto rep = ezdp::du_optimize_rate(m, d);
  emit(ezdp::io::run_report("bounds", m.name(), model_parameters(m), ezdp::io::to_json(rep), clock.seconds()), a.out);
  std::cerr << "verdict: " << rep.winner << " (delta = " << rep.banach_delta << ", 1 - eps = " << rep.rate << ")\n";
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string policy_file;
  std::optional<std::size_t> random;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  double tol = 1e-12;
  std::string out;
};

/// {"policy": [...]} or {"plan": [[...], ...]}.
ezdp::MarkovPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ezdp::ValidationError(ezdp::ValidationError::Kind::Shape, std::string("policy file: ") + e.what());
  }
  ezdp::MarkovPlan plan;
  try {
    if (doc.contains("policy")) plan.steps.push_back({doc["policy"].get<std::vector<ezdp::ActionIndex>>()});
    else if (doc.contains("plan"))
      for (const auto& step : doc["plan"]) plan.steps.push_back({step.get<std::vector<ezdp::ActionIndex>>()});
    else throw ezdp::ValidationError(ezdp::ValidationError::Kind::Shape, "policy file needs 'policy' or 'plan'");
  } catch (const json::exception& e) {
    throw ezdp::ValidationError(ezdp::ValidationError::Kind::Shape, std::string("policy file: ") + e.what());
  }
  return plan;
}

int cmd_eval(const EvalArgs& a) {
  Stopwatch clock;
  const auto m = load(a.model);
  ezdp::utility_regime(m);
  json params = model_parameters(m);
  params["tol"] = a.tol;

  if (a.random) {
    const std::size_t horizon = a.horizon == 0 ? 50 : a.horizon;
    const auto sol = ezdp::solve(m, a.tol);
    const auto audit = ezdp::optimality_audit(m, sol.v_star, sol.policy, *a.random, horizon, a.seed);
    params["random"] = *a.random;
    params["seed"] = a.seed;
    params["horizon"] = horizon;
    json result{{"audit", ezdp::io::to_json(audit)}, {"v_star", sol.v_star.values}, {"policy", sol.policy.actions}};
    emit(ezdp::io::run_report("eval", m.name(), params, result, clock.seconds()), a.out);
    return kOk;
  }

  auto plan = load_plan(a.policy_file);
  if (plan.steps.empty()) throw ezdp::ValidationError(ezdp::ValidationError::Kind::Shape, "empty plan");
  // Extend by the last rule up to the requested horizon.
  while (plan.horizon() < a.horizon) plan.steps.push_back(plan.steps.back());
  const auto rep = ezdp::finite_horizon(m, plan, a.tol);
  const auto sol = ezdp::solve(m, a.tol);
  params["horizon"] = plan.horizon();
  json result = ezdp::io::to_json(rep);
  result["v_star"] = sol.v_star.values;
  result["limit_gap"] = ezdp::omega_distance(rep.limit_value.values, sol.v_star.values, m.omega());
  emit(ezdp::io::run_report("eval", m.name(), params, result, clock.seconds()), a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite MDPs under Epstein-Zin preferences: certified value iteration and convergence bounds"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve the Bellman equation and write a report");
  solve->add_option("model", solve_args.model, "Model file (JSON)")->required();
  solve->add_option("--tol", solve_args.tol, "Certified error target in the omega-norm")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap");
  solve->add_option("--out", solve_args.out, "Report path (default stdout)");
  solve->add_option("--trace-csv", solve_args.trace_csv, "Per-iteration CSV trace");

  std::string classify_model;
  auto* classify = app.add_subcommand("classify", "Print regime, theta, M, c and delta");
  classify->add_option("model", classify_model, "Model file (JSON)")->required();

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Du-theorem constants against the Banach constants");
  bounds->add_option("model", bounds_args.model, "Model file (JSON)");
  bounds->add_option("--example", bounds_args.example, "Built-in profile 1 or 2");
  bounds->add_option("--out", bounds_args.out, "Report path (default stdout)");

  EvalArgs eval_args;
  std::size_t random_n = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a Markov plan or audit optimality against random plans");
  eval->add_option("model", eval_args.model, "Model file (JSON)")->required();
  auto* policy_opt = eval->add_option("--policy-file", eval_args.policy_file, "Policy or plan file (JSON)");
  auto* random_opt = eval->add_option("--random", random_n, "Number of random plans to audit");
  eval->add_option("--seed", eval_args.seed, "Seed for random plans");
  eval->add_option("--horizon", eval_args.horizon, "Plan horizon");
  eval->add_option("--tol", eval_args.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_args.out, "Report path (default stdout)");
  policy_opt->excludes(random_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*solve) return guarded([&] { return cmd_solve(solve_args); });
  if (*classify) return guarded([&] { return cmd_classify(classify_model); });
  if (*bounds) return guarded([&] { return cmd_bounds(bounds_args); });
  if (*eval) {
    if (random_opt->count() > 0) eval_args.random = random_n;
    else if (policy_opt->count() == 0) {
      std::cerr << "eval needs --policy-file or --random N\n";
      return kUsage;
    }
    return guarded([&] { return cmd_eval(eval_args); });
  }
  return kUsage;
}
