// ssn: train, apply and benchmark the semismooth Newton SVM solver.
//
// Exit codes: 0 converged / ok, 2 usage, 3 I/O or parse error,
// 4 solver did not converge.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ssn/report.hpp"
#include "ssn/ssn.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kNoConvergence = 4;

using Clock = std::chrono::steady_clock;

struct Options {
  std::string task = "svc";
  std::string data;
  std::string test;
  std::string model_in;
  std::string model_out;
  std::string trace;
  std::string report;
  std::string out;
  std::string trace_dir;
  std::optional<double> C;
  std::optional<double> C_over_l;
  std::optional<double> lambda;
  double epsilon = 1e-2;
  double delta = 1e-6;
  std::size_t max_iter = 100;
  std::size_t cg_max_iter = 200;
  std::optional<double> split;
  std::uint64_t seed = 0;
  bool bias = true;
  bool json = false;
  std::size_t n_features = 0;
  std::vector<double> multipliers{1e-2, 1e-1, 1.0, 1e1, 1e2};
  unsigned jobs = 1;
};

// A bare name that is not an existing path is looked up in $SSN_DATA_DIR.
std::string resolve_data(const std::string& name) {
  namespace fs = std::filesystem;
  if (name.empty()) throw ssn::UsageError("--data is required");
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("SSN_DATA_DIR")) {
    fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  return name;  // let the loader report the I/O error
}

std::string stem(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

ssn::Task task_of(const Options& o) { return ssn::parse_task(o.task); }

double resolve_C(const Options& o, std::size_t l) {
  const int given = (o.C ? 1 : 0) + (o.C_over_l ? 1 : 0) + (o.lambda ? 1 : 0);
  if (given > 1) throw ssn::UsageError("use only one of --C, --C-over-l, --lambda");
  if (o.C_over_l || o.lambda) {
    if (l == 0) throw ssn::UsageError("C relative to l needs a nonempty training set");
    if (o.C_over_l) return *o.C_over_l / static_cast<double>(l);
    // (lambda/2)||w||^2 + (1/l) sum loss  ==  lambda * f with C = 1/(lambda l)
    if (!(*o.lambda > 0.0)) throw ssn::UsageError("--lambda must be > 0");
    return 1.0 / (*o.lambda * static_cast<double>(l));
  }
  return o.C.value_or(1.0);
}

ssn::SolverConfig solver_config(const Options& o) {
  ssn::SolverConfig cfg;
  cfg.delta = o.delta;
  cfg.newton_max_iter = o.max_iter;
  cfg.cg_max_iter = o.cg_max_iter;
  return cfg;
}

// SVC labels must be +-1; anything else with two distinct values is remapped.
ssn::Dataset prepare_labels(ssn::Dataset d, ssn::Task task) {
  if (task != ssn::Task::Svc) return d;
  const bool canonical = std::all_of(d.y.begin(), d.y.end(),
                                     [](double v) { return v == 1.0 || v == -1.0; });
  return canonical ? d : ssn::remap_labels(std::move(d));
}

struct Loaded {
  ssn::Dataset raw;  // labels prepared, no bias
  double seconds = 0.0;
};

Loaded load(const Options& o, ssn::Task task, const std::string& path) {
  const auto t0 = Clock::now();
  Loaded L;
  L.raw = prepare_labels(ssn::load_libsvm(resolve_data(path), o.n_features), task);
  L.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return L;
}

ssn::Metrics evaluate(ssn::Task task, const ssn::DenseVector& w, const ssn::Dataset& test) {
  return task == ssn::Task::Svc ? ssn::accuracy(w, test) : ssn::mse(w, test);
}

void warn(const std::vector<std::string>& ws) {
  for (const auto& w : ws) std::cerr << "warning: " << w << '\n';
}

void emit_report(const Options& o, const ssn::RunReport& r) {
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw ssn::IoError("cannot write '" + o.report + "'");
    f << ssn::to_json(r).dump(2) << '\n';
  }
  if (o.json) {
    std::cout << ssn::to_json(r).dump(2) << '\n';
    return;
  }
  std::printf("dataset %s  task %s  l=%zu n=%zu  C=%.6g (C*l=%.6g)", r.dataset_name.c_str(),
              std::string(ssn::to_string(r.task)).c_str(), r.samples, r.features, r.C,
              r.C_over_l);
  if (r.task == ssn::Task::Svr) std::printf("  epsilon=%.6g", r.epsilon);
  std::printf("\nstatus %s  k=%zu  cg=%zu  res=%.3e  active=%.4f  solve=%.3fs load=%.3fs\n",
              r.status.c_str(), r.k, r.total_cg, r.final_residual, r.final_active_ratio,
              r.solve_seconds, r.load_seconds);
  if (r.metric)
    std::printf("%s %.6g (n_test=%zu)\n", std::string(ssn::to_string(r.metric->kind)).c_str(),
                r.metric->value, r.metric->n_test);
}

void write_trace(const std::string& path, const ssn::Solution& s) {
  std::ofstream f(path);
  if (!f) throw ssn::IoError("cannot write '" + path + "'");
  ssn::write_trace_csv(f, s.trace);
}

// Train on `train_raw`, optionally evaluate on `test_raw`; fills a report.
struct Fit {
  ssn::Solution sol;
  ssn::RunReport report;
  ssn::Model model;
};

Fit fit(const Options& o, ssn::Task task, const std::string& name, const ssn::Dataset& train_raw,
        const ssn::Dataset* test_raw, double load_seconds, double C) {
  const ssn::Dataset train = o.bias ? ssn::append_bias(train_raw) : train_raw;
  const ssn::Problem p(train, task, C, o.epsilon);
  Fit f;
  f.sol = ssn::solve(p, solver_config(o));
  f.report = ssn::make_report(name, p, f.sol, load_seconds);
  f.model = {task, f.sol.omega, o.bias, C, task == ssn::Task::Svr ? o.epsilon : 0.0};
  if (test_raw) {
    ssn::PreparedTest t = ssn::prepare_test(*test_raw, train_raw.feature_count(), o.bias);
    f.report.warnings = t.warnings;
    if (t.data.size() > 0) f.report.metric = evaluate(task, f.sol.omega, t.data);
  }
  return f;
}

// Splits or loads the held-out set according to --test / --split.
struct TrainTest {
  ssn::Dataset train;
  std::optional<ssn::Dataset> test;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

TrainTest train_test(const Options& o, ssn::Task task) {
  TrainTest tt;
  Loaded L = load(o, task, o.data);
  tt.seconds = L.seconds;
  if (!o.test.empty() && o.split) throw ssn::UsageError("use --test or --split, not both");
  if (o.split) {
    ssn::SplitResult s = ssn::stratified_split(L.raw, {*o.split, o.seed}, task == ssn::Task::Svc);
    tt.train = std::move(s.train);
    tt.test = std::move(s.test);
    tt.warnings = std::move(s.warnings);
  } else {
    tt.train = std::move(L.raw);
    if (!o.test.empty()) {
      Loaded T = load(o, task, o.test);
      tt.test = std::move(T.raw);
      tt.seconds += T.seconds;
    }
  }
  return tt;
}

int cmd_train(const Options& o) {
  const ssn::Task task = task_of(o);
  TrainTest tt = train_test(o, task);
  const double C = resolve_C(o, tt.train.size());
  Fit f = fit(o, task, stem(o.data), tt.train, tt.test ? &*tt.test : nullptr, tt.seconds, C);
  f.report.warnings.insert(f.report.warnings.begin(), tt.warnings.begin(), tt.warnings.end());
  warn(f.report.warnings);
  if (!o.trace.empty()) {
    write_trace(o.trace, f.sol);
    f.report.trace_path = o.trace;
  }
  if (!o.model_out.empty()) {
    ssn::save_model(o.model_out, f.model);
    f.report.model_path = o.model_out;
  }
  emit_report(o, f.report);
  return f.sol.status == ssn::SolveStatus::Converged ? kOk : kNoConvergence;
}

ssn::Model load_checked_model(const Options& o, const CLI::App& sub) {
  ssn::Model m = ssn::load_model(o.model_in);
  if (sub.count("--task") && ssn::parse_task(o.task) != m.task)
    throw ssn::UsageError("model was trained for " + std::string(ssn::to_string(m.task)) +
                          ", not " + o.task);
  return m;
}

int cmd_predict(const Options& o, const CLI::App& sub) {
  const ssn::Model m = load_checked_model(o, sub);
  ssn::Dataset raw = ssn::load_libsvm(resolve_data(o.data));
  ssn::PreparedTest t = ssn::prepare_test(raw, m.raw_features(), m.bias_appended);
  warn(t.warnings);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw ssn::IoError("cannot write '" + o.out + "'");
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    if (m.task == ssn::Task::Svc)
      out << (ssn::predict_label(m.omega, t.data.x, i) > 0 ? "1" : "-1") << '\n';
    else
      out << ssn::detail::format_double(t.data.x.row_dot(i, m.omega)) << '\n';
  }
  return kOk;
}

int cmd_eval(const Options& o, const CLI::App& sub) {
  if (o.model_in.empty()) {
    // no model: train on the split (or full data) and score the held-out part
    if (!o.split && o.test.empty())
      throw ssn::UsageError("eval without --model needs --split or --test");
    return cmd_train(o);
  }
  const ssn::Model m = load_checked_model(o, sub);
  Options mo = o;
  mo.task = std::string(ssn::to_string(m.task));
  TrainTest tt = train_test(mo, m.task);
  warn(tt.warnings);
  const ssn::Dataset& target = tt.test ? *tt.test : tt.train;
  ssn::PreparedTest t = ssn::prepare_test(target, m.raw_features(), m.bias_appended);
  warn(t.warnings);
  const ssn::Metrics met = evaluate(m.task, m.omega, t.data);
  if (o.json) {
    nlohmann::ordered_json j = ssn::to_json(met);
    j["dataset_name"] = stem(o.data);
    j["task"] = std::string(ssn::to_string(m.task));
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("%s %.6g (n_test=%zu)\n", std::string(ssn::to_string(met.kind)).c_str(),
                met.value, met.n_test);
  }
  return kOk;
}

struct SweepRow {
  double multiplier = 0.0;
  double C = 0.0;
  std::optional<Fit> fit;
  std::string error;
};

int cmd_sweep(const Options& o) {
  const ssn::Task task = task_of(o);
  if (o.C || o.C_over_l || o.lambda)
    throw ssn::UsageError("sweep takes --multipliers, not a single C");
  if (o.multipliers.empty()) throw ssn::UsageError("--multipliers is empty");
  TrainTest tt = train_test(o, task);
  warn(tt.warnings);
  if (tt.train.size() == 0) throw ssn::UsageError("empty training set");
  const std::string name = stem(o.data);
  const double l = static_cast<double>(tt.train.size());

  std::vector<SweepRow> rows(o.multipliers.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < rows.size();) {
      SweepRow& r = rows[i];
      r.multiplier = o.multipliers[i];
      r.C = r.multiplier / l;
      try {
        r.fit = fit(o, task, name, tt.train, tt.test ? &*tt.test : nullptr, tt.seconds, r.C);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, rows.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw ssn::IoError("cannot write '" + o.out + "'");
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  out << "dataset,task,C_over_l,C,cg,k,res,t,status,active_ratio,metric,metric_value,error\n";
  bool all_ok = true;
  char buf[512];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    if (r.fit && !o.trace_dir.empty()) {
      std::filesystem::create_directories(o.trace_dir);
      std::snprintf(buf, sizeof buf, "%s_C%g.csv", name.c_str(), r.multiplier);
      try {
        write_trace((std::filesystem::path(o.trace_dir) / buf).string(), r.fit->sol);
      } catch (const std::exception& e) {
        std::cerr << "warning: " << e.what() << '\n';
      }
    }
    if (!r.fit) {
      all_ok = false;
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::snprintf(buf, sizeof buf, "%s,%s,%g,%.6g,,,,,error,,,,%s\n", name.c_str(),
                    o.task.c_str(), r.multiplier, r.C, err.c_str());
      out << buf;
      continue;
    }
    const ssn::RunReport& rep = r.fit->report;
    all_ok = all_ok && r.fit->sol.status == ssn::SolveStatus::Converged;
    std::string metric, value;
    if (rep.metric) {
      metric = std::string(ssn::to_string(rep.metric->kind));
      std::snprintf(buf, sizeof buf, "%.6g", rep.metric->value);
      value = buf;
    }
    std::snprintf(buf, sizeof buf, "%s,%s,%g,%.6g,%zu,%zu,%.3e,%.4f,%s,%.4f,%s,%s,\n",
                  name.c_str(), o.task.c_str(), r.multiplier, r.C, rep.total_cg, rep.k,
                  rep.final_residual, rep.solve_seconds, rep.status.c_str(),
                  rep.final_active_ratio, metric.c_str(), value.c_str());
    out << buf;
  }
  return all_ok ? kOk : kNoConvergence;
}

void add_data_flags(CLI::App* s, Options& o) {
  s->add_option("--data", o.data, "LIBSVM file (bare names are looked up in $SSN_DATA_DIR)")
      ->required();
  s->add_option("--n-features", o.n_features, "minimum feature count when parsing");
}

void add_train_flags(CLI::App* s, Options& o) {
  s->add_option("--task", o.task, "svc or svr")->check(CLI::IsMember({"svc", "svr"}));
  add_data_flags(s, o);
  s->add_option("--test", o.test, "held-out LIBSVM file to score after training");
  s->add_option("--C", o.C, "penalty C (default 1)");
  s->add_option("--C-over-l", o.C_over_l, "penalty as a multiple of 1/l");
  s->add_option("--lambda", o.lambda, "regularization weight; C = 1/(lambda * l)");
  s->add_option("--epsilon", o.epsilon, "SVR tube width")->capture_default_str();
  s->add_option("--delta", o.delta, "gradient-norm tolerance")->capture_default_str();
  s->add_option("--max-iter", o.max_iter, "Newton iteration cap")->capture_default_str();
  s->add_option("--cg-max-iter", o.cg_max_iter, "CG iteration cap")->capture_default_str();
  s->add_option("--split", o.split, "train fraction of a seeded stratified split")
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--seed", o.seed, "split seed")->capture_default_str();
  s->add_flag("--bias,!--no-bias", o.bias, "append a constant-1 feature (default on)");
  s->add_flag("--json", o.json, "print the report as JSON");
  s->add_option("--report", o.report, "also write the JSON report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semismooth Newton solver for L2-loss SVC and epsilon-L2-loss SVR"};
  app.require_subcommand(1);
  Options o;

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_train_flags(train, o);
  train->add_option("--model", o.model_out, "write the trained model here");
  train->add_option("--trace", o.trace, "write the per-iteration trace CSV here");

  CLI::App* predict = app.add_subcommand("predict", "apply a model to a LIBSVM file");
  predict->add_option("--model", o.model_in, "model file")->required();
  add_data_flags(predict, o);
  predict->add_option("--task", o.task, "expected task (checked against the model)")
      ->check(CLI::IsMember({"svc", "svr"}));
  predict->add_option("--out", o.out, "write predictions here instead of stdout");

  CLI::App* eval = app.add_subcommand(
      "eval", "score a model, or train on a split and score the held-out part");
  add_train_flags(eval, o);
  eval->add_option("--model", o.model_in, "model file to score");
  eval->add_option("--trace", o.trace, "trace CSV when training");

  CLI::App* sweep = app.add_subcommand("sweep", "train over several C = m/l values");
  add_train_flags(sweep, o);
  sweep->add_option("--multipliers", o.multipliers, "values m in C = m/l")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--jobs", o.jobs, "parallel solves")->capture_default_str();
  sweep->add_option("--out", o.out, "write the CSV here instead of stdout");
  sweep->add_option("--trace-dir", o.trace_dir, "write one trace CSV per C here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(o);
    if (*predict) return cmd_predict(o, *predict);
    if (*eval) return cmd_eval(o, *eval);
    if (*sweep) return cmd_sweep(o);
  } catch (const ssn::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ssn::InvalidTaskError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ssn::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ssn::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
