#include "htpg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "htpg/error.hpp"

namespace htpg {

namespace {

using Array = std::vector<double>;
using Value = std::variant<double, bool, std::string, Array>;

struct Entry {
  Value value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg,
                       const std::string& path = {}) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw ConfigError(os.str(), line, path);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// Drops a trailing '#' comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && in_str) {
      ++i;
    } else if (c == '"') {
      in_str = !in_str;
    } else if (c == '#' && !in_str) {
      return line.substr(0, i);
    }
  }
  return line;
}

Value parse_value(std::string_view raw, int line) {
  const std::string_view s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      char c = s[i];
      if (c == '\\') {
        if (i + 2 >= s.size()) fail(line, "dangling escape in string");
        c = s[++i];
        if (c != '"' && c != '\\') fail(line, "unsupported escape in string");
      } else if (c == '"') {
        fail(line, "unexpected quote inside string");
      }
      out.push_back(c);
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    Array arr;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (item.empty()) {
        if (comma == std::string_view::npos) break;
        fail(line, "empty array element");
      }
      const auto v = parse_number(item);
      if (!v) fail(line, "array elements must be numbers: '" + std::string(item) + "'");
      arr.push_back(*v);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) break;  // trailing comma
    }
    return arr;
  }
  if (const auto v = parse_number(s)) return *v;
  fail(line, "cannot parse value '" + std::string(s) + "'");
}

bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.';
  });
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                       : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!valid_key(name)) fail(line_no, "bad section name '" + name + "'");
      if (!seen.insert(name).second) {
        fail(line_no, "duplicate section [" + name + "]", name);
      }
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) fail(line_no, "bad key '" + key + "'");
    if (sections.empty()) fail(line_no, "key '" + key + "' outside any section", key);
    auto& sec = sections.back();
    const std::string path = sec.name + "." + key;
    if (sec.entries.count(key)) fail(line_no, "duplicate key '" + path + "'", path);
    sec.entries.emplace(key, Entry{parse_value(line.substr(eq + 1), line_no), line_no});
  }
  return sections;
}

// Typed accessors that mark entries as consumed.
class Reader {
 public:
  explicit Reader(Section& s) : s_(s) {}

  std::optional<double> number(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* d = std::get_if<double>(&e->value)) return *d;
    fail(e->line, "expected a number", path(key));
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const auto v = number(key);
    if (!v) return std::nullopt;
    if (std::floor(*v) != *v || std::abs(*v) > 9.0e15) {
      fail(s_.entries[key].line, "expected an integer", path(key));
    }
    return static_cast<std::int64_t>(*v);
  }

  std::optional<bool> boolean(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* b = std::get_if<bool>(&e->value)) return *b;
    fail(e->line, "expected true or false", path(key));
  }

  std::optional<std::string> string(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&e->value)) return *s;
    fail(e->line, "expected a quoted string", path(key));
  }

  std::optional<Array> array(const std::string& key) {
    Entry* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* a = std::get_if<Array>(&e->value)) return *a;
    fail(e->line, "expected an array", path(key));
  }

  int line_of(const std::string& key) const {
    const auto it = s_.entries.find(key);
    return it == s_.entries.end() ? s_.line : it->second.line;
  }

  std::string path(const std::string& key) const { return s_.name + "." + key; }

  void finish() const {
    for (const auto& [key, e] : s_.entries) {
      if (!e.used) fail(e.line, "unknown key '" + path(key) + "'", path(key));
    }
  }

 private:
  Entry* take(const std::string& key) {
    const auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  Section& s_;
};

void read_env(Reader& r, ExperimentConfig& cfg) {
  if (const auto kind = r.string("kind")) {
    if (*kind == "trapped_car") {
      cfg.env = EnvSpec::trapped_car();
    } else if (*kind == "mountain_car") {
      cfg.env = EnvSpec::mountain_car();
    } else {
      fail(r.line_of("kind"), "env.kind must be trapped_car or mountain_car",
           "env.kind");
    }
  }
  if (const auto v = r.boolean("start_at_false_goal")) cfg.start_at_false_goal = *v;
  EnvSpec& e = cfg.env;
  const std::pair<const char*, double*> fields[] = {
      {"state_low", &e.state_low},       {"state_high", &e.state_high},
      {"velocity_low", &e.velocity_low}, {"velocity_high", &e.velocity_high},
      {"action_low", &e.action_low},     {"action_high", &e.action_high},
      {"init_low", &e.init_low},         {"init_high", &e.init_high},
      {"reward_bound", &e.reward_bound}, {"force", &e.force},
      {"gravity", &e.gravity},           {"goal_position", &e.goal_position},
      {"goal_reward", &e.goal_reward},   {"false_low", &e.false_low},
      {"false_high", &e.false_high},     {"false_reward", &e.false_reward},
      {"false_start", &e.false_start},   {"exit_position", &e.exit_position},
      {"step_reward", &e.step_reward},
  };
  for (const auto& [key, dst] : fields) {
    if (const auto v = r.number(key)) *dst = *v;
  }
  if (const auto v = r.integer("max_steps")) e.max_steps = *v;
}

FamilySpec read_family(Reader& r, const std::string& name) {
  FamilySpec f{name, {}};
  const auto alpha = r.integer("alpha");
  if (!alpha) fail(r.line_of("alpha"), "missing key '" + r.path("alpha") + "'", r.path("alpha"));
  if (*alpha != 1 && *alpha != 2) {
    fail(r.line_of("alpha"), r.path("alpha") + " must be 1 or 2", r.path("alpha"));
  }
  const std::string mode = r.string("scale").value_or("adaptive");
  if (mode != "adaptive" && mode != "fixed") {
    fail(r.line_of("scale"), r.path("scale") + " must be adaptive or fixed",
         r.path("scale"));
  }
  f.policy = default_policy(static_cast<int>(*alpha), mode == "adaptive");
  if (const auto s0 = r.number("sigma0")) {
    if (mode != "fixed") {
      fail(r.line_of("sigma0"), r.path("sigma0") + " requires scale = \"fixed\"",
           r.path("sigma0"));
    }
    f.policy.scale_mode = FixedScale{*s0};
  }
  if (const auto a = r.array("theta_x0")) f.policy.theta_x0 = *a;
  if (const auto a = r.array("theta_sigma")) f.policy.theta_sigma = *a;
  return f;
}

void read_train(Reader& r, ExperimentConfig& cfg) {
  TrainConfig& t = cfg.train;
  if (const auto v = r.number("gamma")) t.gamma = *v;
  if (const auto v = r.number("epsilon")) t.epsilon_clip = *v;
  if (const auto v = r.integer("episodes")) t.episodes = *v;
  if (const auto v = r.string("clip")) {
    if (*v == "literal") {
      t.clip_mode = ClipMode::Literal;
    } else if (*v == "symmetric") {
      t.clip_mode = ClipMode::Symmetric;
    } else {
      fail(r.line_of("clip"), "train.clip must be literal or symmetric", "train.clip");
    }
  }
  if (const auto v = r.string("q_mode")) {
    if (*v == "shared") {
      t.q_mode = QMode::Shared;
    } else if (*v == "fresh") {
      t.q_mode = QMode::Fresh;
    } else {
      fail(r.line_of("q_mode"), "train.q_mode must be shared or fresh", "train.q_mode");
    }
  }

  const std::string rule = r.string("step_rule").value_or("linear_range");
  const auto b = r.number("b");
  const auto a_start = r.number("alpha_start");
  const auto a_end = r.number("alpha_end");
  const auto a_const = r.number("alpha");
  if (rule == "power") {
    t.step_rule = PowerDecay{b.value_or(0.5)};
  } else if (rule == "linear_range") {
    t.step_rule = LinearRange{a_start.value_or(0.005), a_end.value_or(5e-9),
                              std::max<std::int64_t>(t.episodes, 1)};
  } else if (rule == "constant") {
    t.step_rule = ConstantStep{a_const.value_or(0.01)};
  } else {
    fail(r.line_of("step_rule"),
         "train.step_rule must be power, linear_range or constant", "train.step_rule");
  }
  if (b && !(*b > 0.0 && *b < 1.0)) {
    fail(r.line_of("b"), "train.b: b ∈ (0,1) required", "train.b");
  }

  const std::string update = r.string("update_rule").value_or("plain");
  const auto l1j = r.number("l1j");
  if (update == "plain") {
    t.update_rule = PlainAscent{};
  } else if (update == "lipschitz") {
    if (!l1j) fail(r.line_of("update_rule"), "lipschitz update needs train.l1j", "train.l1j");
    t.update_rule = LipschitzAware{*l1j};
  } else {
    fail(r.line_of("update_rule"), "train.update_rule must be plain or lipschitz",
         "train.update_rule");
  }
}

void read_run(Reader& r, ExperimentConfig& cfg) {
  if (const auto v = r.string("name")) cfg.name = *v;
  if (const auto v = r.string("outputs")) cfg.outputs = *v;
  if (const auto v = r.array("seeds")) {
    cfg.seeds.clear();
    for (double s : *v) {
      if (s < 0 || std::floor(s) != s || s > 9.0e15) {
        fail(r.line_of("seeds"), "run.seeds must be non-negative integers", "run.seeds");
      }
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
}

}  // namespace

PolicyParams default_policy(int alpha, bool adaptive) {
  PolicyParams p;
  p.alpha = alpha;
  p.theta_x0.assign(3, 0.0);
  p.theta_sigma = {0.0};
  if (adaptive) {
    p.scale_mode = AdaptiveScale{};
  } else {
    p.scale_mode = FixedScale{1.0};
  }
  return p;
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg, 0, path);
  };
  if (families.empty()) bad("policy", "at least one [policy.<family>] section is required");
  if (seeds.empty()) bad("run.seeds", "at least one seed is required");
  std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
  if (uniq.size() != seeds.size()) bad("run.seeds", "seeds must be distinct");
  if (name.empty() || name.find('/') != std::string::npos) {
    bad("run.name", "name must be non-empty and contain no '/'");
  }
  if (!(train.gamma > 0.0 && train.gamma < 1.0)) bad("train.gamma", "gamma must lie in (0, 1)");
  try {
    env.validate();
  } catch (const ParameterError& e) {
    bad("env", e.what());
  }
  try {
    TrainConfig t = train;
    t.policy_init = families.front().policy;
    t.validate();
  } catch (const ScheduleError& e) {
    bad("train", e.what());
  } catch (const ParameterError& e) {
    const std::string what = e.what();
    bad(what.rfind("b ", 0) == 0 ? "train.b" : "train", what);
  }
  for (const auto& f : families) {
    const std::string path = "policy." + f.name;
    try {
      f.policy.validate();
    } catch (const ParameterError& e) {
      bad(path, e.what());
    }
    if (f.policy.theta_x0.size() != 3) {
      bad(path + ".theta_x0", "needs 3 weights for [position, velocity, 1]");
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Section> sections = tokenize(text);
  ExperimentConfig cfg;

  // [env] and [train] before policies; policies keep file order.
  auto find = [&](const std::string& n) -> Section* {
    for (auto& s : sections) {
      if (s.name == n) return &s;
    }
    return nullptr;
  };
  if (Section* s = find("env")) {
    Reader r(*s);
    read_env(r, cfg);
    r.finish();
  }
  if (Section* s = find("train")) {
    Reader r(*s);
    read_train(r, cfg);
    r.finish();
  }
  if (Section* s = find("run")) {
    Reader r(*s);
    read_run(r, cfg);
    r.finish();
  }
  for (auto& s : sections) {
    if (s.name == "env" || s.name == "train" || s.name == "run") continue;
    if (s.name.rfind("policy.", 0) == 0 && s.name.size() > 7) {
      const std::string fam = s.name.substr(7);
      if (fam.find('.') != std::string::npos || fam.find('/') != std::string::npos) {
        fail(s.line, "bad family name '" + fam + "'", s.name);
      }
      Reader r(s);
      cfg.families.push_back(read_family(r, fam));
      r.finish();
      continue;
    }
    fail(s.line, "unknown section [" + s.name + "]", s.name);
  }
  cfg.env.gamma = cfg.train.gamma;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      throw NotFoundError("config file not found: " + path.string());
    }
    throw IoError("cannot read config file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace htpg
