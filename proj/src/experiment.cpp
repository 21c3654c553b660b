#include "htpg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "htpg/error.hpp"

namespace htpg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      throw NotFoundError("file not found: " + path.string());
    }
    throw IoError("cannot read: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

unsigned worker_threads() {
  if (const char* env = std::getenv("HTPG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> train_grid(const ExperimentConfig& cfg,
                                  unsigned threads) {
  cfg.validate();
  const auto env = make_environment(cfg.env, cfg.start_at_false_goal);
  std::vector<RunRecord> runs;
  for (const auto& fam : cfg.families) {
    for (const auto seed : cfg.seeds) runs.push_back({fam.name, seed, {}, {}});
  }

  std::vector<TrainConfig> configs;
  for (const auto& fam : cfg.families) {
    for (const auto seed : cfg.seeds) {
      TrainConfig tc = cfg.train;
      tc.policy_init = fam.policy;
      tc.seed = seed;
      configs.push_back(std::move(tc));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      runs[i].metrics = run_training(configs[i], *env).metrics;
    }
  };
  const unsigned n = std::min<unsigned>(threads ? threads : worker_threads(),
                                        static_cast<unsigned>(runs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return runs;
}

std::string run_csv(const RunMetrics& m) {
  std::string out = "episode,return,avg_return_100,update_count\n";
  for (std::size_t i = 0; i < m.returns.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_double(m.returns[i]) + ',' +
           format_double(m.moving_avg_100[i]) + ',' +
           std::to_string(m.update_counts[i]) + '\n';
  }
  if (m.divergence) {
    out += "diverged," + std::to_string(*m.diverged_episode) + ",," +
           std::to_string(m.wall_updates) + '\n';
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunMetrics*>> by_family;
  for (const auto& r : runs) {
    if (!by_family.count(r.family)) order.push_back(r.family);
    by_family[r.family].push_back(&r.metrics);
  }
  std::vector<AggregateRow> rows;
  for (const auto& fam : order) {
    const auto& ms = by_family[fam];
    std::size_t longest = 0;
    for (const auto* m : ms) longest = std::max(longest, m->episodes());
    for (std::size_t e = 0; e < longest; ++e) {
      AggregateRow row{fam, static_cast<std::int64_t>(e + 1), 0.0,
                       std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), 0};
      for (const auto* m : ms) {
        if (e >= m->episodes()) continue;
        const double v = m->moving_avg_100[e];
        row.mean += v;
        row.min = std::min(row.min, v);
        row.max = std::max(row.max, v);
        ++row.runs;
      }
      row.mean /= static_cast<double>(row.runs);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {
constexpr const char* kAggregateHeader =
    "family,episode,mean_avg_return_100,min_avg_return_100,max_avg_return_100,runs";
}  // namespace

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + '\n';
  for (const auto& r : rows) {
    out += r.family + ',' + std::to_string(r.episode) + ',' +
           format_double(r.mean) + ',' + format_double(r.min) + ',' +
           format_double(r.max) + ',' + std::to_string(r.runs) + '\n';
  }
  return out;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<AggregateRow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kAggregateHeader) throw IoError("aggregate CSV: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() != 6) {
      throw IoError("aggregate CSV line " + std::to_string(line_no) +
                    ": expected 6 columns");
    }
    AggregateRow r;
    r.family = cols[0];
    try {
      r.episode = std::stoll(cols[1]);
      r.mean = std::stod(cols[2]);
      r.min = std::stod(cols[3]);
      r.max = std::stod(cols[4]);
      r.runs = std::stoll(cols[5]);
    } catch (const std::exception&) {
      throw IoError("aggregate CSV line " + std::to_string(line_no) +
                    ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round tick spacing covering [lo, hi] with about `target` intervals.
double tick_step(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_svg(const std::vector<AggregateRow>& rows,
                       const std::string& title) {
  constexpr double W = 800, H = 480, L = 70, R = 160, T = 40, B = 50;
  constexpr const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<std::string> order;
  std::map<std::string, std::vector<const AggregateRow*>> by_family;
  double x_max = 1, y_lo = 0, y_hi = 0;
  bool first = true;
  for (const auto& r : rows) {
    if (!by_family.count(r.family)) order.push_back(r.family);
    by_family[r.family].push_back(&r);
    x_max = std::max<double>(x_max, static_cast<double>(r.episode));
    if (first) {
      y_lo = r.min;
      y_hi = r.max;
      first = false;
    }
    y_lo = std::min(y_lo, r.min);
    y_hi = std::max(y_hi, r.max);
  }
  if (y_hi - y_lo < 1e-9) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double ystep = tick_step(y_lo, y_hi, 5);
  y_lo = std::floor(y_lo / ystep) * ystep;
  y_hi = std::ceil(y_hi / ystep) * ystep;
  const double xstep = tick_step(1, x_max, 5);

  auto px = [&](double e) { return L + (e - 1) / std::max(1.0, x_max - 1) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y_lo) / (y_hi - y_lo) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << xml_escape(title) << "</text>\n";

  for (double y = y_lo; y <= y_hi + 0.5 * ystep; y += ystep) {
    s << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << fixed(py(y))
      << "\" y2=\"" << fixed(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py(y) + 4)
      << "\" text-anchor=\"end\">" << fixed(y, ystep < 1 ? 3 : 1) << "</text>\n";
  }
  for (double x = 0; x <= x_max + 0.5 * xstep; x += xstep) {
    const double e = std::max(1.0, x);
    s << "<line x1=\"" << fixed(px(e)) << "\" x2=\"" << fixed(px(e)) << "\" y1=\""
      << H - B << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fixed(px(e)) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\">" << fixed(e, 0) << "</text>\n";
  }
  s << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << H - B
    << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" x2=\"" << L << "\" y1=\"" << T << "\" y2=\""
    << H - B << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\">episode</text>\n";
  s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\">average return (last 100 episodes)</text>\n";

  for (std::size_t f = 0; f < order.size(); ++f) {
    const auto& pts = by_family[order[f]];
    const char* color = palette[f % std::size(palette)];
    s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (const auto* p : pts) s << fixed(px(p->episode)) << ',' << fixed(py(p->max)) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      s << fixed(px((*it)->episode)) << ',' << fixed(py((*it)->min)) << ' ';
    }
    s << "\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* p : pts) s << fixed(px(p->episode)) << ',' << fixed(py(p->mean)) << ' ';
    s << "\"/>\n";
    const double ly = T + 10 + 20 * static_cast<double>(f);
    s << "<line x1=\"" << W - R + 15 << "\" x2=\"" << W - R + 40 << "\" y1=\"" << ly
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    s << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">"
      << xml_escape(order[f]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::filesystem::path replot(const std::filesystem::path& dir,
                             const std::string& name) {
  const auto rows = parse_aggregate_csv(read_file(dir / "aggregate.csv"));
  const auto svg = dir / (name + ".svg");
  write_file(svg, render_svg(rows, name));
  return svg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                unsigned threads) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.outputs, ec);
  if (ec) {
    throw IoError("cannot create output directory " + cfg.outputs.string() +
                  ": " + ec.message());
  }
  ExperimentResult res;
  res.runs = train_grid(cfg, threads);
  for (auto& r : res.runs) {
    r.csv = cfg.outputs / (r.family + "_seed" + std::to_string(r.seed) + ".csv");
    write_file(r.csv, run_csv(r.metrics));
  }
  res.aggregate_csv = cfg.outputs / "aggregate.csv";
  write_file(res.aggregate_csv, aggregate_csv(aggregate(res.runs)));
  res.svg = replot(cfg.outputs, cfg.name);
  return res;
}

ExperimentConfig first_exit_config(const FirstExitRequest& req) {
  ExperimentConfig cfg;
  cfg.name = "first_exit";
  cfg.env = EnvSpec::trapped_car();
  cfg.start_at_false_goal = true;
  cfg.families = {{"cauchy", default_policy(1, true)},
                  {"gaussian", default_policy(2, true)}};
  cfg.seeds = req.seeds;
  cfg.train.episodes = req.episodes;
  cfg.train.step_rule = LinearRange{0.005, 5e-9, std::max<std::int64_t>(req.episodes, 1)};
  return cfg;
}

FirstExitResult run_first_exit(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.families.size() < 2) {
    throw ParameterError("first-exit comparison needs two families");
  }
  ExperimentConfig c = cfg;
  c.start_at_false_goal = true;
  const auto runs = train_grid(c, threads);
  FirstExitResult out;
  for (const auto& fam : c.families) {
    FamilyRuns fr{fam.name, {}};
    for (const auto& r : runs) {
      if (r.family == fam.name) fr.runs.push_back(r.metrics);
    }
    out.families.push_back(std::move(fr));
  }
  out.summary = first_exit_statistics(out.families);
  return out;
}

}  // namespace htpg
