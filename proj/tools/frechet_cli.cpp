// Command-line surface for the Frechet-distance engine: fitting and
// persisting Gaussian stats, computing the distance with either engine,
// timing the engines, measuring reduced-precision error, checking
// gradients, and running input-space descent attacks.
//
// Exit codes: 0 success, 1 usage/validation error, 2 numerical failure.

#include "frechet/frechet.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace frechet;

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  Rng r(base ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xC2B2AE3D27D4EB4Full) ^ (c * 0x165667B19E3779F9ull));
  return r.next_u64();
}

std::vector<index_t> parse_count_list(const std::string& csv, const char* what) {
  std::vector<index_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const long long v = std::stoll(tok);
    if (v < 1) throw std::invalid_argument(std::string(what) + ": counts must be >= 1, got " + tok);
    out.push_back(static_cast<index_t>(v));
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

int cmd_stats(const std::string& input, const std::string& output, const std::string& repr) {
  Matrix samples = read_samples_csv(input);
  if (samples.cols() < 2)
    throw std::invalid_argument(input + ": needs at least 2 samples, got " +
                                std::to_string(samples.cols()));
  FeatureMatrix x(std::move(samples));
  GaussianStats stats = stats_from_samples(x, repr == "factor");
  write_stats_file(output, stats);
  std::cout << "d=" << stats.dim() << " n=" << stats.sample_count()
            << " tr_sigma=" << csv_double(stats.trace()) << " repr=" << repr << "\n";
  return 0;
}

int cmd_fid(const std::string& fake_path, const std::string& real_path, const std::string& engine_name_str) {
  Matrix fake_samples = read_samples_csv(fake_path);
  if (fake_samples.cols() < 2)
    throw std::invalid_argument(fake_path + ": needs at least 2 samples (m >= 2), got " +
                                std::to_string(fake_samples.cols()));
  GaussianStats real = read_stats_file(real_path);
  if (fake_samples.rows() != real.dim())
    throw std::invalid_argument("fake dimension d=" + std::to_string(fake_samples.rows()) +
                                " does not match stats dimension d=" + std::to_string(real.dim()));
  FeatureMatrix fake(std::move(fake_samples));
  const index_t m = fake.k();

  std::cout << "engine,kind,m,mean_sq_diff,tr_sigma1,tr_sigma2,tr_sqrt,raw_total,fid\n";
  if (engine_name_str == "fast" || engine_name_str == "baseline") {
    const Engine engine = engine_name_str == "fast" ? Engine::fast : Engine::baseline;
    FidBreakdown b = compute_fid(fake, real, engine);
    std::cout << engine_name_str << ",exact," << m << "," << csv_double(b.mean_sq_diff) << ","
              << csv_double(b.tr_sigma1) << "," << csv_double(b.tr_sigma2) << ","
              << csv_double(b.tr_sqrt) << "," << csv_double(b.raw_total) << ","
              << csv_double(b.total) << "\n";
  } else if (engine_name_str == "mean-only") {
    GaussianStats s1 = stats_from_samples(fake, /*as_factor=*/true);
    const double v = fid_mean_only(s1, real);
    std::cout << "mean-only,approximation," << m << "," << csv_double(v) << ",,,,,"
              << csv_double(v) << "\n";
  } else {
    GaussianStats s1 = stats_from_samples(fake, /*as_factor=*/true);
    const double v = fid_diag_only(s1, real);
    std::cout << "diag-only,approximation," << m << "," << csv_double(fid_mean_only(s1, real))
              << "," << csv_double(s1.trace()) << "," << csv_double(real.trace()) << ",,"
              << csv_double(v) << "," << csv_double(v) << "\n";
  }
  std::cout << "# m=" << m << " fake samples; no minimum is enforced, statistical quality "
            << "improves with larger m\n";
  return 0;
}

int cmd_bench(index_t d, const std::string& m_list, index_t n, index_t trials,
              const std::string& mode, const std::string& output, std::uint64_t seed) {
  const std::vector<index_t> ms = parse_count_list(m_list, "bench --m-list");
  const bool run_fast = mode == "fast" || mode == "both";
  const bool run_baseline = mode == "baseline" || mode == "both";

  // Precomputed real-side covariance from n synthetic samples.
  Rng rng(mix_seed(seed, 0xB0));
  Matrix x2 = gaussian_matrix(rng, d, n >= 2 ? n : 2);
  GaussianStats stats2 = stats_from_samples(FeatureMatrix(std::move(x2)), /*as_factor=*/false);

  std::ofstream out(output, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + output);
  out << "m,engine,mean_seconds,std_seconds\n";
  std::cout << "m,engine,mean_seconds,std_seconds\n";

  auto report = [&](index_t m, const char* engine, const std::vector<double>& times) {
    const MeanStd ms_ = mean_std(times);
    out << m << "," << engine << "," << csv_double(ms_.mean) << "," << csv_double(ms_.std) << "\n";
    std::cout << m << "," << engine << "," << csv_double(ms_.mean) << "," << csv_double(ms_.std)
              << "\n";
  };

  for (index_t m : ms) {
    Rng mrng(mix_seed(seed, 0xF1, static_cast<std::uint64_t>(m)));
    Matrix x1 = gaussian_matrix(mrng, d, std::max<index_t>(m, 2));
    FeatureMatrix fx(std::move(x1));
    CenteredFactor c1 = center_factor(fx);
    GaussianStats stats1(sample_mean(fx), center_factor(fx), fx.k());

    if (run_fast) {
      std::vector<double> times;
      volatile double sink = trace_sqrt_auto(c1, stats2).trace_sqrt;  // warmup
      for (index_t t = 0; t < trials; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        sink = trace_sqrt_auto(c1, stats2).trace_sqrt;
        times.push_back(elapsed_seconds(t0));
      }
      (void)sink;
      report(m, "fast", times);
    }
    if (run_baseline) {
      std::vector<double> times;
      volatile double sink = trace_sqrt_baseline(stats1, stats2);  // warmup
      for (index_t t = 0; t < trials; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        sink = trace_sqrt_baseline(stats1, stats2);
        times.push_back(elapsed_seconds(t0));
      }
      (void)sink;
      report(m, "baseline", times);
    }
  }
  return 0;
}

int cmd_numerr(index_t d, const std::string& m_list, const std::string& precision_list,
               index_t trials, const std::string& output, std::uint64_t seed) {
  const std::vector<index_t> ms = parse_count_list(m_list, "numerr --m-list");
  std::vector<Precision> precisions;
  {
    std::stringstream ss(precision_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "f32") precisions.push_back(Precision::f32);
      else if (tok == "f64") precisions.push_back(Precision::f64);
      else if (!tok.empty())
        throw std::invalid_argument("numerr --precision-list: unknown precision '" + tok + "'");
    }
    if (precisions.empty()) throw std::invalid_argument("numerr --precision-list: empty list");
  }

  std::ofstream out(output, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + output);
  out << "m,precision,ground_truth,err_fullsqrt,err_fast\n";
  std::cout << "m,precision,ground_truth,err_fullsqrt,err_fast\n";

  for (index_t m : ms) {
    for (Precision p : precisions) {
      for (index_t t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(m),
                         p == Precision::f32 ? 32u : 64u, static_cast<std::uint64_t>(t)));
        NumerrCase c = numerr_case(rng, d, m, p);
        const char* pname = p == Precision::f32 ? "f32" : "f64";
        out << m << "," << pname << "," << csv_double(c.ground_truth) << ","
            << csv_double(c.err_baseline_fullsqrt) << "," << csv_double(c.err_fast) << "\n";
        std::cout << m << "," << pname << "," << csv_double(c.ground_truth) << ","
                  << csv_double(c.err_baseline_fullsqrt) << "," << csv_double(c.err_fast) << "\n";
      }
    }
  }
  return 0;
}

GaussianStats gradcheck_target(index_t d, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7A));
  Matrix y = gaussian_matrix(rng, d, 4 * d);
  y.map() *= 1.2;
  y.map().array() += 0.5;
  return stats_from_samples(FeatureMatrix(std::move(y)), /*as_factor=*/true);
}

int cmd_gradcheck(index_t d, index_t m, std::uint64_t seed, double step, bool duplicate_columns,
                  bool corrupt_gradient) {
  Rng rng(mix_seed(seed, 0x6C));
  Matrix x = gaussian_matrix(rng, d, m);
  if (duplicate_columns && m >= 2)
    for (index_t i = 0; i < d; ++i) x(i, 1) = x(i, 0);
  FeatureMatrix x1(std::move(x));
  GaussianStats target = gradcheck_target(d, seed);

  double max_rel = 0.0, mean_rel = 0.0;
  index_t clamped = 0;
  if (!corrupt_gradient) {
    FdCheckResult r = finite_diff_check(x1, target, step);
    max_rel = r.max_rel_err;
    mean_rel = r.mean_rel_err;
    clamped = r.clamped_directions;
  } else {
    // Test hook: damage the analytic gradient and rerun the comparison;
    // the checker must notice.
    FidGradient g = fid_gradient(x1, target);
    Matrix corrupted = g.wrt_features;
    corrupted(0, 0) = corrupted(0, 0) * 1.5 + 0.1 * (1.0 + std::abs(corrupted(0, 0)));
    clamped = g.clamped_gradient_count;
    Matrix probe = x1.values();
    double sum_rel = 0.0;
    for (index_t j = 0; j < m; ++j)
      for (index_t i = 0; i < d; ++i) {
        const double x0 = probe(i, j);
        const double h = step * (1.0 + std::abs(x0));
        probe(i, j) = x0 + h;
        const double fp = fid_value_raw(probe, target);
        probe(i, j) = x0 - h;
        const double fm = fid_value_raw(probe, target);
        probe(i, j) = x0;
        const double fd = (fp - fm) / (2.0 * h);
        const double an = corrupted(i, j);
        const double rel = std::abs(an - fd) / (std::abs(an) + std::abs(fd) + 1e-8);
        max_rel = std::max(max_rel, rel);
        sum_rel += rel;
      }
    mean_rel = sum_rel / static_cast<double>(d * m);
  }

  std::cout << "max_rel_err=" << csv_double(max_rel) << " mean_rel_err=" << csv_double(mean_rel)
            << " skipped_clamped_directions=" << clamped << "\n";
  if (max_rel > 1e-4) {
    std::cerr << "gradcheck: max relative error " << max_rel << " exceeds 1e-4\n";
    return 2;
  }
  return 0;
}

int cmd_attack(const std::string& mode, index_t steps, double lr, index_t batch,
               const std::string& squash, std::uint64_t seed, index_t eval_every, bool scale_loss,
               const std::string& train_path, const std::string& val_path,
               const std::string& init_csv, const std::string& encoder_kind, index_t input_dim,
               std::uint64_t encoder_seed, const std::string& output) {
  GaussianStats train = read_stats_file(train_path);
  GaussianStats val = read_stats_file(val_path);
  if (train.dim() != val.dim())
    throw std::invalid_argument("train stats dimension d=" + std::to_string(train.dim()) +
                                " does not match validation stats dimension d=" +
                                std::to_string(val.dim()));

  AttackConfig cfg;
  cfg.mode = mode == "maximize" ? AttackMode::maximize_from_real : AttackMode::minimize_from_noise;
  cfg.steps = steps;
  cfg.learning_rate = lr;
  cfg.batch = batch;
  cfg.seed = seed;
  cfg.eval_every = eval_every;
  cfg.scale_loss = scale_loss;
  if (squash == "auto")
    cfg.squash = cfg.mode == AttackMode::minimize_from_noise ? Squash::sigmoid : Squash::clip_unit;
  else if (squash == "sigmoid")
    cfg.squash = Squash::sigmoid;
  else if (squash == "clip")
    cfg.squash = Squash::clip_unit;
  else
    cfg.squash = Squash::none;

  Encoder encoder = encoder_kind == "linear"
                        ? Encoder::fixed_linear(input_dim, train.dim(), encoder_seed)
                        : Encoder::identity(train.dim());

  Matrix init;
  if (!init_csv.empty()) {
    init = read_samples_csv(init_csv);
    if (init.rows() != encoder.input_dim())
      throw std::invalid_argument(init_csv + ": sample dimension p=" + std::to_string(init.rows()) +
                                  " does not match encoder input dimension " +
                                  std::to_string(encoder.input_dim()));
    if (init.cols() != batch)
      throw std::invalid_argument(init_csv + ": has " + std::to_string(init.cols()) +
                                  " samples, batch is " + std::to_string(batch));
  } else if (cfg.mode == AttackMode::minimize_from_noise) {
    Rng rng(mix_seed(seed, 0xA1));
    init = gaussian_matrix(rng, encoder.input_dim(), batch);
  } else {
    if (encoder.kind() != Encoder::Kind::identity)
      throw std::invalid_argument("attack: maximize mode with a linear encoder needs --init-csv");
    Rng rng(mix_seed(seed, 0xA2));
    init = sample_from_stats(train, batch, rng);
    if (cfg.squash == Squash::clip_unit) init = squash_apply(Squash::clip_unit, init);
  }

  AttackTrace trace = run_attack(cfg, encoder, train, val, init);

  std::ofstream out(output, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + output);
  out << "step,train_fid,val_fid\n";
  for (const AttackRecord& r : trace.records)
    out << r.step << "," << csv_double(r.train_fid) << "," << csv_double(r.val_fid) << "\n";

  const AttackRecord& first = trace.records.front();
  const AttackRecord& last = trace.records.back();
  std::cout << "steps=" << last.step << " initial_train_fid=" << csv_double(first.train_fid)
            << " final_train_fid=" << csv_double(last.train_fid)
            << " initial_val_fid=" << csv_double(first.val_fid)
            << " final_val_fid=" << csv_double(last.val_fid) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet distance engine: exact low-rank and baseline computation, "
               "gradients, and input-space descent experiments"};
  app.require_subcommand(1);

  // stats
  auto* stats = app.add_subcommand("stats", "Fit Gaussian stats to a sample CSV and persist them");
  std::string stats_input, stats_output, stats_repr = "factor";
  stats->add_option("--input", stats_input, "sample CSV, one sample per row")->required();
  stats->add_option("--output", stats_output, "output stats file")->required();
  stats->add_option("--repr", stats_repr, "representation: full or factor")
      ->check(CLI::IsMember({"full", "factor"}));

  // fid
  auto* fid = app.add_subcommand("fid", "Distance between a fake-sample CSV and persisted stats");
  std::string fid_fake, fid_real, fid_engine = "fast";
  fid->add_option("--fake", fid_fake, "fake sample CSV")->required();
  fid->add_option("--real", fid_real, "real stats file")->required();
  fid->add_option("--engine", fid_engine, "fast, baseline, mean-only or diag-only")
      ->check(CLI::IsMember({"fast", "baseline", "mean-only", "diag-only"}));

  // bench
  auto* bench = app.add_subcommand("bench", "Time the fast and baseline trace engines");
  index_t bench_d = 2048, bench_n = 2048, bench_trials = 10;
  std::string bench_mlist = "8,16,32,64,128,256", bench_mode = "both", bench_out = "bench.csv";
  std::uint64_t bench_seed = 1;
  bench->add_option("--dim", bench_d, "feature dimension d")->check(CLI::PositiveNumber);
  bench->add_option("--m-list", bench_mlist, "comma-separated fake-sample counts");
  bench->add_option("--n", bench_n, "real-sample count for the precomputed covariance")
      ->check(CLI::PositiveNumber);
  bench->add_option("--trials", bench_trials, "timed repetitions after one warmup")
      ->check(CLI::PositiveNumber);
  bench->add_option("--mode", bench_mode, "fast, baseline or both")
      ->check(CLI::IsMember({"fast", "baseline", "both"}));
  bench->add_option("--output", bench_out, "output CSV")->required();
  bench->add_option("--seed", bench_seed, "seed for the synthetic data");

  // numerr
  auto* numerr = app.add_subcommand("numerr", "Reduced-precision error of both trace routes");
  index_t numerr_d = 512, numerr_trials = 5;
  std::string numerr_mlist = "8,16,32,64,128,256", numerr_plist = "f32,f64",
              numerr_out = "numerr.csv";
  std::uint64_t numerr_seed = 1;
  numerr->add_option("--dim", numerr_d, "feature dimension d")->check(CLI::PositiveNumber);
  numerr->add_option("--m-list", numerr_mlist, "comma-separated fake-sample counts");
  numerr->add_option("--precision-list", numerr_plist, "comma-separated: f32,f64");
  numerr->add_option("--trials", numerr_trials, "trials per (m, precision)")
      ->check(CLI::PositiveNumber);
  numerr->add_option("--output", numerr_out, "output CSV")->required();
  numerr->add_option("--seed", numerr_seed, "base seed");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Analytic gradient vs central differences");
  index_t gc_d = 16, gc_m = 6;
  std::uint64_t gc_seed = 1;
  double gc_step = 1e-4;
  bool gc_dup = false, gc_corrupt = false;
  gradcheck->add_option("--dim", gc_d, "feature dimension d")->check(CLI::PositiveNumber);
  gradcheck->add_option("--m", gc_m, "fake-sample count")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", gc_seed, "seed");
  gradcheck->add_option("--step", gc_step, "base finite-difference step")->check(CLI::PositiveNumber);
  gradcheck->add_flag("--duplicate-columns", gc_dup,
                      "duplicate the first sample to exercise the rank-deficient path");
  gradcheck->add_flag("--corrupt-gradient", gc_corrupt, "test hook: damage the analytic gradient")
      ->group("");

  // attack
  auto* attack = app.add_subcommand("attack", "Gradient descent/ascent on the input samples");
  std::string at_mode = "minimize", at_squash = "auto", at_train, at_val, at_init,
              at_encoder = "identity", at_out = "attack.csv";
  index_t at_steps = 500, at_batch = 64, at_eval = 10, at_input_dim = 0;
  double at_lr = 1.0;
  std::uint64_t at_seed = 1, at_encoder_seed = 7;
  bool at_scale = false;
  attack->add_option("--mode", at_mode, "minimize (from noise) or maximize (from real)")
      ->check(CLI::IsMember({"minimize", "maximize"}));
  attack->add_option("--steps", at_steps, "gradient steps")->check(CLI::NonNegativeNumber);
  attack->add_option("--lr", at_lr, "learning rate")->check(CLI::PositiveNumber);
  attack->add_option("--batch", at_batch, "batch size m")->check(CLI::PositiveNumber);
  attack->add_option("--squash", at_squash, "sigmoid, clip, none or auto (by mode)")
      ->check(CLI::IsMember({"sigmoid", "clip", "none", "auto"}));
  attack->add_option("--seed", at_seed, "seed for the starting point");
  attack->add_option("--eval-every", at_eval, "record train/val FID every this many steps")
      ->check(CLI::PositiveNumber);
  attack->add_flag("--scale-loss", at_scale, "divide the gradient by the detached FID value");
  attack->add_option("--train-stats", at_train, "training stats file")->required();
  attack->add_option("--val-stats", at_val, "validation stats file")->required();
  attack->add_option("--init-csv", at_init, "starting batch as a sample CSV");
  attack->add_option("--encoder", at_encoder, "identity or linear")
      ->check(CLI::IsMember({"identity", "linear"}));
  attack->add_option("--input-dim", at_input_dim, "sample dimension p for the linear encoder");
  attack->add_option("--encoder-seed", at_encoder_seed, "seed for the linear encoder weights");
  attack->add_option("--output", at_out, "output CSV (step,train_fid,val_fid)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (stats->parsed()) return cmd_stats(stats_input, stats_output, stats_repr);
    if (fid->parsed()) return cmd_fid(fid_fake, fid_real, fid_engine);
    if (bench->parsed())
      return cmd_bench(bench_d, bench_mlist, bench_n, bench_trials, bench_mode, bench_out,
                       bench_seed);
    if (numerr->parsed())
      return cmd_numerr(numerr_d, numerr_mlist, numerr_plist, numerr_trials, numerr_out,
                        numerr_seed);
    if (gradcheck->parsed())
      return cmd_gradcheck(gc_d, gc_m, gc_seed, gc_step, gc_dup, gc_corrupt);
    if (attack->parsed()) {
      if (at_encoder == "linear" && at_input_dim < 1)
        throw std::invalid_argument("attack: --encoder linear requires --input-dim >= 1");
      return cmd_attack(at_mode, at_steps, at_lr, at_batch, at_squash, at_seed, at_eval, at_scale,
                        at_train, at_val, at_init, at_encoder, at_input_dim, at_encoder_seed,
                        at_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const frechet::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
