// powindex: power indices of weighted voting games, and reconstruction of
// games from partial index vectors.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "powidx/acceptance.hpp"
#include "powidx/chow_inverse.hpp"
#include "powidx/dshap.hpp"
#include "powidx/io.hpp"
#include "powidx/kernels.hpp"
#include "powidx/ltf.hpp"
#include "powidx/parallel.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/rng.hpp"
#include "powidx/shapley_inverse.hpp"

using nlohmann::json;
using namespace powidx;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware default
  std::string kernel = "auto";
  std::string manifest_path;
};

struct ManifestRecorder {
  const GlobalOpts& g;
  std::string command;
  json config = json::object();
  std::string input_digest;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void note_input(const std::string& bytes) { input_digest = io::digest_hex(bytes); }
  void write_output(const std::string& path, const std::string& content) {
    io::write_file(path, content);
    outputs.emplace_back(path, io::digest_hex(content));
  }
  void finalize() {
    if (g.manifest_path.empty()) return;
    json m;
    m["command"] = command;
    m["seed"] = g.seed;
    m["config"] = config;
    m["input_digest"] = input_digest;
    json outs = json::array();
    for (const auto& [p, d] : outputs) outs.push_back({{"path", p}, {"digest", d}});
    m["outputs"] = outs;
    m["kernel"] = kernels::isa_name(kernels::active_isa());
    m["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count();
    io::write_file(g.manifest_path, m.dump(2) + "\n");
  }
};

void apply_global(const GlobalOpts& g) {
  if (g.threads > 0) set_thread_count(g.threads);
  if (g.kernel == "scalar") kernels::force_isa(kernels::Isa::Scalar);
  else if (g.kernel == "avx2") kernels::force_isa(kernels::Isa::Avx2);
}

std::set<std::size_t> parse_indices(const std::string& csv) {
  std::set<std::size_t> s;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) s.insert(std::stoull(tok));
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power indices of weighted voting games"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value config file; command-line flags win");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all randomness");
  app.add_option("--threads", g.threads, "worker threads (default: hardware)");
  app.add_option("--kernel", g.kernel, "auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_option("--manifest", g.manifest_path, "write a run manifest JSON here");

  std::string cmdline;
  for (int i = 0; i < argc; ++i) {
    if (i) cmdline += ' ';
    cmdline += argv[i];
  }

  // ---- indices ----
  auto* cmd_idx = app.add_subcommand("indices", "compute an index vector of a game");
  cmd_idx->fallthrough();
  std::string idx_game, idx_kind = "chow", idx_out, idx_csv;
  double idx_p = 0.5, idx_gamma = 0.1, idx_eps = 0.1, idx_delta = 0.05;
  bool idx_estimate = false;
  std::size_t idx_hermite_samples = 200000;
  cmd_idx->add_option("--game", idx_game, "game JSON file")->required();
  cmd_idx->add_option("--kind", idx_kind, "chow|chow_p|shapley|corr_p|hermite")
      ->check(CLI::IsMember({"chow", "chow_p", "shapley", "corr_p", "hermite"}));
  cmd_idx->add_option("--p", idx_p, "bias for chow_p / corr_p");
  cmd_idx->add_flag("--estimate", idx_estimate, "sample instead of exact enumeration");
  cmd_idx->add_option("--gamma", idx_gamma, "estimate accuracy (shapley)");
  cmd_idx->add_option("--eps", idx_eps, "estimate accuracy (chow)");
  cmd_idx->add_option("--delta", idx_delta, "estimate failure probability");
  cmd_idx->add_option("--samples", idx_hermite_samples, "hermite sample count");
  cmd_idx->add_option("--out", idx_out, "output JSON path (default: stdout)");
  cmd_idx->add_option("--csv", idx_csv, "also write CSV here");

  // ---- estimate (alias surface for sampled indices) ----
  auto* cmd_est = app.add_subcommand("estimate", "sampled index estimates");
  cmd_est->fallthrough();
  std::string est_game, est_kind = "shapley", est_indices, est_out;
  double est_gamma = 0.1, est_eps = 0.1, est_delta = 0.05;
  cmd_est->add_option("--game", est_game)->required();
  cmd_est->add_option("--kind", est_kind, "shapley|chow")
      ->check(CLI::IsMember({"shapley", "chow"}));
  cmd_est->add_option("--indices", est_indices, "chow: comma list of indices");
  cmd_est->add_option("--gamma", est_gamma);
  cmd_est->add_option("--eps", est_eps);
  cmd_est->add_option("--delta", est_delta);
  cmd_est->add_option("--out", est_out);

  // ---- reconstruct ----
  auto* cmd_rec = app.add_subcommand("reconstruct", "reconstruct a game from partial indices");
  cmd_rec->fallthrough();
  cmd_rec->require_subcommand(1);
  std::string rec_input, rec_out;
  std::size_t rec_n = 0;
  double rec_eps = 0.0, rec_delta = 0.05;
  bool rec_sampled = false, rec_paper_exact = false;
  auto add_rec_common = [&](CLI::App* c) {
    c->add_option("--input", rec_input, "partial index JSON")->required();
    c->add_option("--n", rec_n, "number of voters")->required();
    c->add_option("--eps", rec_eps, "accuracy target");
    c->add_option("--delta", rec_delta, "failure probability");
    c->add_flag("--sampled", rec_sampled, "sampled verification (default exact)");
    c->add_flag("--paper-exact", rec_paper_exact,
                "print the paper-scale parameter formulas and exit");
    c->add_option("--out", rec_out, "output JSON path (default: stdout)");
  };
  auto* rec_chow = cmd_rec->add_subcommand("chow", "from partial Chow parameters");
  rec_chow->fallthrough();
  add_rec_common(rec_chow);
  double rec_tau = 0.0;
  std::size_t rec_head_cap = 0;
  rec_chow->add_option("--tau", rec_tau, "head/tail split parameter");
  rec_chow->add_option("--head-cap", rec_head_cap, "max head size");
  auto* rec_shap = cmd_rec->add_subcommand("shapley", "from partial Shapley indices");
  rec_shap->fallthrough();
  add_rec_common(rec_shap);
  double rec_gamma = 0.0;
  rec_shap->add_option("--gamma", rec_gamma, "weight granularity");
  rec_shap->add_option("--head-cap", rec_head_cap, "max head size");

  // ---- sample-dshap ----
  auto* cmd_smp = app.add_subcommand("sample-dshap", "draw from the Shapley distribution");
  cmd_smp->fallthrough();
  std::size_t smp_n = 0, smp_count = 0;
  std::string smp_out;
  cmd_smp->add_option("-n,--n", smp_n)->required();
  cmd_smp->add_option("--count", smp_count)->required();
  cmd_smp->add_option("--out", smp_out, "output path (default: stdout)");

  // ---- distance ----
  auto* cmd_dst = app.add_subcommand("distance", "distance between two games");
  cmd_dst->fallthrough();
  std::string dst_f, dst_g, dst_metric = "chow", dst_indices;
  cmd_dst->add_option("--f", dst_f)->required();
  cmd_dst->add_option("--g", dst_g)->required();
  cmd_dst->add_option("--metric", dst_metric,
                      "hamming|chow|chow_partial|shapley|shapley_partial|shapley_fourier")
      ->check(CLI::IsMember({"hamming", "chow", "chow_partial", "shapley",
                             "shapley_partial", "shapley_fourier"}));
  cmd_dst->add_option("--indices", dst_indices, "comma list for the partial metrics");

  // ---- selftest ----
  auto* cmd_self = app.add_subcommand("selftest", "run the acceptance checks");
  cmd_self->fallthrough();
  std::string self_ids;
  cmd_self->add_option("--criteria", self_ids, "comma list of criterion ids (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  apply_global(g);
  ManifestRecorder manifest{g};
  manifest.command = cmdline;
  Rng rng(g.seed);

  try {
    if (cmd_idx->parsed()) {
      const std::string text = io::read_file(idx_game);
      manifest.note_input(text);
      WeightedLTF f = io::game_from_json_text(text);
      manifest.config = {{"kind", idx_kind}, {"p", idx_p}, {"estimate", idx_estimate}};
      IndexVector v;
      if (idx_kind == "chow") {
        v = idx_estimate ? [&] {
          std::set<std::size_t> s;
          for (std::size_t i = 0; i <= f.n(); ++i) s.insert(i);
          PartialIndexVector pv = chow_estimate(make_oracle(f), f.n(), s, idx_eps,
                                                idx_delta, rng);
          IndexVector out = IndexVector::zeros(IndexKind::Chow, f.n());
          for (const auto& [i, val] : pv.entries) out.value_ref(i) = val;
          return out;
        }()
                         : chow_exact(f);
      } else if (idx_kind == "chow_p") {
        v = chow_pbiased_exact(f, idx_p);
      } else if (idx_kind == "corr_p") {
        v = coordinate_correlation_pbiased(f, idx_p);
      } else if (idx_kind == "shapley") {
        v = idx_estimate ? shapley_estimate(make_oracle(f), f.n(), idx_gamma, idx_delta, rng)
                         : shapley_exact(f);
      } else {
        WeightedLTF unit = f;
        double l2 = unit.weight_l2();
        for (double& w : unit.weights) w /= l2;
        unit.threshold /= l2;
        v = hermite_degree1_estimate(unit, idx_hermite_samples, rng);
      }
      const std::string out_text = io::index_vector_to_json_text(v);
      if (idx_out.empty())
        std::cout << out_text;
      else
        manifest.write_output(idx_out, out_text);
      if (!idx_csv.empty()) manifest.write_output(idx_csv, io::index_vector_to_csv(v));
    } else if (cmd_est->parsed()) {
      const std::string text = io::read_file(est_game);
      manifest.note_input(text);
      WeightedLTF f = io::game_from_json_text(text);
      manifest.config = {{"kind", est_kind}};
      std::string out_text;
      if (est_kind == "shapley") {
        IndexVector v = shapley_estimate(make_oracle(f), f.n(), est_gamma, est_delta, rng);
        out_text = io::index_vector_to_json_text(v);
      } else {
        std::set<std::size_t> s = est_indices.empty() ? [&] {
          std::set<std::size_t> all;
          for (std::size_t i = 0; i <= f.n(); ++i) all.insert(i);
          return all;
        }()
                                                      : parse_indices(est_indices);
        PartialIndexVector v = chow_estimate(make_oracle(f), f.n(), s, est_eps, est_delta, rng);
        out_text = io::partial_to_json_text(v);
      }
      if (est_out.empty())
        std::cout << out_text;
      else
        manifest.write_output(est_out, out_text);
    } else if (cmd_rec->parsed()) {
      const bool is_chow = rec_chow->parsed();
      if (rec_paper_exact) {
        if (is_chow)
          std::cout << chow_paper_parameter_table(rec_eps > 0 ? rec_eps : 0.2);
        else
          std::cout << shapley_paper_parameter_table(rec_n, rec_eps > 0 ? rec_eps : 0.25);
        manifest.finalize();
        return 0;
      }
      const std::string text = io::read_file(rec_input);
      manifest.note_input(text);
      PartialIndexVector input = io::partial_from_json_text(text);
      ReconstructionResult res;
      if (is_chow) {
        ChowReconConfig cfg;
        if (rec_eps > 0) cfg.eps = rec_eps;
        cfg.delta = rec_delta;
        if (rec_tau > 0) cfg.tau = rec_tau;
        if (rec_head_cap > 0) cfg.head_cap = rec_head_cap;
        cfg.verify = rec_sampled ? VerifyMode::Sampled : VerifyMode::Exact;
        manifest.config = {{"eps", cfg.eps}, {"delta", cfg.delta}, {"tau", cfg.tau},
                           {"sampled", rec_sampled}};
        res = reconstruct_partial_chow(input, rec_n, cfg, rng);
      } else {
        ShapReconConfig cfg;
        if (rec_eps > 0) cfg.eps = rec_eps;
        cfg.delta_fail = rec_delta;
        if (rec_gamma > 0) cfg.gamma = rec_gamma;
        if (rec_head_cap > 0) cfg.head_cap = rec_head_cap;
        cfg.verify = rec_sampled ? VerifyMode::Sampled : VerifyMode::Exact;
        manifest.config = {{"eps", cfg.eps}, {"delta", cfg.delta_fail},
                           {"gamma", cfg.gamma}, {"sampled", rec_sampled}};
        res = reconstruct_partial_shapley(input, rec_n, cfg, rng);
      }
      json out;
      out["ltf"] = {{"weights", res.ltf.weights}, {"threshold", res.ltf.threshold}};
      out["certified"] = res.certified;
      out["achieved_distance"] = res.achieved_distance;
      out["candidates_tried"] = res.candidates_tried;
      out["provenance"] = res.provenance;
      if (!is_chow) {
        out["head_size_guess"] = res.head_size_guess;
        out["w1"] = res.w1;
        out["w2"] = res.w2;
      }
      const std::string out_text = out.dump(2) + "\n";
      if (rec_out.empty())
        std::cout << out_text;
      else
        manifest.write_output(rec_out, out_text);
      manifest.finalize();
      return res.certified ? 0 : 1;
    } else if (cmd_smp->parsed()) {
      DShapParams d = make_dshap(smp_n);
      std::ostringstream os;
      for (std::size_t t = 0; t < smp_count; ++t) {
        std::vector<int> x = dshap_sample(d, rng);
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
        os << "\n";
      }
      manifest.config = {{"n", smp_n}, {"count", smp_count}};
      if (smp_out.empty())
        std::cout << os.str();
      else
        manifest.write_output(smp_out, os.str());
    } else if (cmd_dst->parsed()) {
      const std::string tf = io::read_file(dst_f), tg = io::read_file(dst_g);
      manifest.note_input(tf + tg);
      WeightedLTF f = io::game_from_json_text(tf);
      WeightedLTF gg = io::game_from_json_text(tg);
      std::set<std::size_t> s = parse_indices(dst_indices);
      double d = 0.0;
      if (dst_metric == "hamming") d = d_hamming(f, gg);
      else if (dst_metric == "chow") d = d_chow(f, gg);
      else if (dst_metric == "chow_partial") d = d_chow_partial(f, gg, s);
      else if (dst_metric == "shapley") d = d_shapley(f, gg);
      else if (dst_metric == "shapley_partial") d = d_shapley_partial(f, gg, s);
      else d = shapley_fourier_distance(f, gg);
      std::cout.precision(17);
      std::cout << d << "\n";
    } else if (cmd_self->parsed()) {
      std::set<int> ids;
      for (std::size_t v : parse_indices(self_ids)) ids.insert(static_cast<int>(v));
      auto results = acceptance::run(ids, &std::cout);
      bool all = true;
      for (const auto& r : results) all = all && r.pass;
      manifest.finalize();
      return all ? 0 : 1;
    }
  } catch (const io::ParseError& e) {
    std::cerr << "parse error at line " << e.line << ", column " << e.column << ": "
              << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  manifest.finalize();
  return 0;
}
