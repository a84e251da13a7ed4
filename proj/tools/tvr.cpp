#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvr/tv.hpp"

namespace {

using nlohmann::json;

int default_threads() {
  if (const char* env = std::getenv("TVR_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) tvr::fail(tvr::ErrorCode::MalformedInput, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::optional<std::string>& path,
                  const std::string& text) {
  if (!path) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) tvr::fail(tvr::ErrorCode::MalformedInput, "cannot write " + *path);
  out << text;
}

struct PolicyFlags {
  long bits = 128;
  double tau = 1e-6;
  double zeta = 1e-10;
  long max_bits = 1 << 16;

  tvr::PrecisionPolicy policy() const {
    tvr::PrecisionPolicy p;
    p.initial_bits = bits;
    p.tau = tau;
    p.zeta = zeta;
    p.max_bits = max_bits;
    tvr::validate(p);
    return p;
  }
};

void add_policy_flags(CLI::App* cmd, PolicyFlags& pf) {
  cmd->add_option("--bits", pf.bits, "initial mantissa width");
  cmd->add_option("--tau", pf.tau, "relative agreement threshold");
  cmd->add_option("--zero-threshold", pf.zeta, "zero threshold");
  cmd->add_option("--max-bits", pf.max_bits, "precision cap");
}

json record_json(const tvr::TVRecord& rec) {
  return json{{"r", rec.r},
              {"tv", rec.tv_str},
              {"tv_double", rec.tv_double},
              {"zero", rec.declared_zero},
              {"bits", static_cast<long>(rec.bits_used)},
              {"adm", rec.admissible_count},
              {"nodes", rec.nodes_visited},
              {"ms", rec.wall_ms}};
}

int run(int argc, char** argv) {
  CLI::App app{"Turaev-Viro invariants of closed 3-manifolds"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors,
               "machine-parsable errors on stderr");

  std::string input;
  std::optional<std::string> out;
  int r = 5, r_min = 5, r_max = 21;
  int threads = default_threads();
  int model = 1;
  int steps = 50;
  uint64_t seed = 1;
  uint64_t mc_samples = 200000;
  std::string format = "json";
  std::optional<double> target;
  std::optional<std::string> resume;

  auto* info = app.add_subcommand("info", "skeleton and homology summary");
  info->add_option("input", input)->required();

  auto* tv = app.add_subcommand("tv", "one invariant value");
  PolicyFlags tv_pf;
  tv->add_option("input", input)->required();
  tv->add_option("--r", r, "odd order")->required();
  tv->add_option("--threads", threads);
  tv->add_option("--out", out);
  add_policy_flags(tv, tv_pf);

  auto* seq = app.add_subcommand("sequence", "records for a range of odd r");
  PolicyFlags seq_pf;
  seq->add_option("input", input)->required();
  seq->add_option("--r-min", r_min);
  seq->add_option("--r-max", r_max);
  seq->add_option("--threads", threads);
  seq->add_option("--out", out);
  seq->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  seq->add_option("--resume", resume, "existing JSON-lines file to extend");
  seq->add_option("--target", target, "limit used for the S_r CSV column");
  add_policy_flags(seq, seq_pf);

  auto* count = app.add_subcommand("count", "admissible-coloring count");
  count->add_option("input", input)->required();
  count->add_option("--r", r)->required();

  auto* poly = app.add_subcommand("polytope", "admissibility polytope report");
  poly->add_option("input", input)->required();
  poly->add_option("--mc-samples", mc_samples, "extra Monte-Carlo estimate");
  poly->add_option("--seed", seed);
  poly->add_option("--out", out);

  auto* opt = app.add_subcommand("optimize", "random walk over Pachner moves");
  opt->add_option("input", input)->required();
  opt->add_option("--steps", steps);
  opt->add_option("--seed", seed);
  opt->add_option("--mc-samples", mc_samples);
  opt->add_option("--out", out, "path for the optimized triangulation");

  auto* ratios = app.add_subcommand("ratios", "estimator vs. count table");
  ratios->add_option("input", input)->required();
  ratios->add_option("--r-min", r_min);
  ratios->add_option("--r-max", r_max);
  ratios->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  ratios->add_option("--out", out);

  auto* fit = app.add_subcommand("fit", "asymptote fit of a series file");
  fit->add_option("input", input, "JSON-lines series file")->required();
  fit->add_option("--model", model)->check(CLI::IsMember({1, 2}));
  fit->add_option("--target", target, "limit for the S_r column");
  fit->add_option("--out", out, "gnuplot data file (r, lq, curve, S_r)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*info) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      tvr::Skeleton sk = tvr::compute_skeleton(table);
      tvr::HomologyInfo hom = tvr::homology_z2(sk);
      tvr::AdmissibilityPolytope p = tvr::build_polytope(sk);
      std::cout << "n=" << sk.n << " v=" << sk.v << " e=" << sk.e
                << " f=" << sk.f << " euler=" << (sk.v - sk.e + sk.f - sk.n)
                << " h1=" << hom.h1_z2_rank << " fastpath="
                << (hom.integer_fast_path_allowed() ? "yes" : "no")
                << " polytope_dim=" << p.dim
                << " oriented=" << (sk.orientation_consistent ? "yes" : "no")
                << '\n';
    } else if (*tv) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      tvr::TVRecord rec =
          tvr::tv_invariant(table, r, tv_pf.policy(), 0, threads);
      write_output(out, record_json(rec).dump(2));
    } else if (*seq) {
      if (r_min % 2 == 0 || r_max % 2 == 0 || r_min < 3 || r_max < r_min)
        tvr::fail(tvr::ErrorCode::MalformedInput,
                  "r range must be odd with 3 <= r-min <= r-max");
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      std::vector<tvr::TVRecord> existing;
      if (resume) existing = tvr::series_from_jsonl(read_file(*resume));
      tvr::TVSeries series = tvr::tv_sequence(table, r_min, r_max,
                                              seq_pf.policy(), threads,
                                              existing);
      series.target_limit = target;
      if (format == "csv") {
        write_output(out, tvr::series_to_csv(series));
      } else {
        std::string lines;
        for (const auto& rec : series.records)
          lines += tvr::to_jsonl(rec) + "\n";
        write_output(out, lines);
      }
    } else if (*count) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      tvr::Skeleton sk = tvr::compute_skeleton(table);
      tvr::HomologyInfo hom = tvr::homology_z2(sk);
      tvr::AdmissibilityContext ctx =
          tvr::make_context(sk, r, hom.integer_fast_path_allowed());
      tvr::EnumStats stats =
          tvr::enumerate_admissible(ctx, [](const std::vector<int>&) {});
      json doc = {{"r", r},
                  {"integer_only", ctx.integer_only},
                  {"admissible", stats.admissible_count},
                  {"nodes", stats.nodes_visited},
                  {"ms", stats.wall_ms}};
      std::cout << doc.dump(2) << '\n';
    } else if (*poly) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      tvr::Skeleton sk = tvr::compute_skeleton(table);
      tvr::AdmissibilityPolytope p = tvr::build_polytope(sk);
      std::vector<long> ks = tvr::default_dilations(p.dim);
      std::vector<tvr::EhrhartSample> samples = tvr::ehrhart_samples(p, ks);
      tvr::VolumeEstimate vol = tvr::ehrhart_volume_fit(p.dim, samples);
      json doc;
      doc["dim"] = p.dim;
      doc["rows"] = p.rows.size();
      doc["volume"] = {{"value", vol.value},
                       {"std_error", vol.std_error},
                       {"method", "ehrhart_fit"}};
      json sj = json::array();
      for (const auto& s : samples) sj.push_back({s.k, s.count});
      doc["samples"] = sj;
      if (poly->count("--mc-samples")) {
        tvr::VolumeEstimate mc = tvr::mc_volume(p, mc_samples, seed);
        doc["mc_volume"] = {{"value", mc.value},
                            {"std_error", mc.std_error},
                            {"method", "monte_carlo"},
                            {"degenerate", mc.degenerate}};
      }
      write_output(out, doc.dump(2));
    } else if (*opt) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      auto [best, report] =
          tvr::optimize_triangulation(table, steps, seed, mc_samples);
      if (out) write_output(out, tvr::to_json(best));
      json visited = json::array();
      for (const auto& entry : report.visited) {
        json e = {{"step", entry.step}, {"size", entry.size}};
        if (entry.volume) e["volume"] = *entry.volume;
        visited.push_back(e);
      }
      json doc = {{"best_step", report.best_step},
                  {"best_size", best.n},
                  {"visited", visited}};
      std::cout << doc.dump(2) << '\n';
    } else if (*ratios) {
      tvr::GluingTable table = tvr::parse_triangulation(read_file(input));
      std::vector<int> rs;
      for (int rr = r_min; rr <= r_max; rr += 2) rs.push_back(rr);
      tvr::EstimatorReport report = tvr::estimator_report(table, rs);
      if (format == "csv") {
        std::ostringstream buf;
        buf.precision(17);
        buf << "r,admissible,estimator,estimator_ratio,nodes,nodes_ratio\n";
        for (const auto& row : report.rows)
          buf << row.r << ',' << row.admissible << ',' << row.estimator << ','
              << row.estimator_ratio << ',' << row.nodes_visited << ','
              << row.nodes_ratio << '\n';
        write_output(out, buf.str());
      } else {
        json rows = json::array();
        for (const auto& row : report.rows)
          rows.push_back({{"r", row.r},
                          {"admissible", row.admissible},
                          {"estimator", row.estimator},
                          {"estimator_ratio", row.estimator_ratio},
                          {"nodes", row.nodes_visited},
                          {"nodes_ratio", row.nodes_ratio}});
        json doc = {{"volume", report.volume},
                    {"dim", report.dim},
                    {"rows", rows}};
        write_output(out, doc.dump(2));
      }
    } else if (*fit) {
      tvr::TVSeries series;
      series.records = tvr::series_from_jsonl(read_file(input));
      series.target_limit = target;
      tvr::FitPoints pts;
      for (const auto& rec : series.records)
        if (auto lq = tvr::log_quantity(rec))
          pts.emplace_back(static_cast<double>(rec.r), *lq);
      tvr::FitResult res =
          model == 1 ? tvr::fit_model1(pts) : tvr::fit_model2(pts);
      json doc = {{"model", res.model}, {"a", res.a},     {"b", res.b},
                  {"c", res.c},         {"rss", res.rss},
                  {"points_used", res.points_used}};
      std::cout << doc.dump(2) << '\n';
      if (out) {
        std::vector<std::pair<int, double>> tails;
        if (target) tails = tvr::s_r(series);
        auto tail_of = [&](int rr) -> std::optional<double> {
          for (auto [k, s] : tails)
            if (k == rr) return s;
          return std::nullopt;
        };
        std::ostringstream buf;
        buf.precision(17);
        buf << "# r log_quantity model s_r\n";
        for (const auto& rec : series.records) {
          auto lq = tvr::log_quantity(rec);
          if (!lq) continue;
          double x = rec.r;
          double curve = res.model == 1
                             ? res.a * std::log(x + res.b) / (x + res.b)
                             : res.a / (x + res.b) + res.c;
          buf << rec.r << ' ' << *lq << ' ' << curve << ' ';
          if (auto s = tail_of(rec.r)) buf << *s;
          else buf << "nan";
          buf << '\n';
        }
        write_output(out, buf.str());
      }
    }
  } catch (const tvr::Error& e) {
    int code;
    switch (e.code()) {
      case tvr::ErrorCode::MalformedInput:
      case tvr::ErrorCode::NonInvolutiveGluing:
      case tvr::ErrorCode::SelfGluedFace:
      case tvr::ErrorCode::UngluedFace:
      case tvr::ErrorCode::NotClosedManifoldLike:
      case tvr::ErrorCode::EvenOrderUnsupported:
      case tvr::ErrorCode::MissingTarget:
        code = 2;
        break;
      default:
        code = 3;
        break;
    }
    if (json_errors) {
      json err = {{"error", tvr::error_code_name(e.code())},
                  {"message", e.what()}};
      std::cerr << err.dump() << '\n';
    } else {
      std::cerr << "error (" << tvr::error_code_name(e.code())
                << "): " << e.what() << '\n';
    }
    return code;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
