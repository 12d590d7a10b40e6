#include "airink/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "airink/error.hpp"
#include "text.hpp"

namespace airink {
namespace {

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto end = std::min(value.find(',', start), value.size());
    const auto item = text::trim(value.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, auto&& to_text) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += to_text(items[i]);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value,
                            const std::string& why = {}) {
  throw ConfigError("bad value for " + key + ": '" + std::string(value) + "'" +
                    (why.empty() ? "" : " (" + why + ")"));
}

void set_run_key(RunConfig& c, const std::string& name, const std::string& value) {
  const std::string key = "run." + name;
  std::uint64_t u = 0;
  if (name == "corpus_root") {
    c.corpus_root = value;
  } else if (name == "output_dir") {
    if (value.empty()) bad_value(key, value);
    c.output_dir = value;
  } else if (name == "tasks") {
    c.tasks.clear();
    for (const auto& item : split_list(value)) {
      if (!text::parse_u64(item, u) ||
          std::find(std::begin(kStudiedTasks), std::end(kStudiedTasks), static_cast<int>(u)) ==
              std::end(kStudiedTasks)) {
        bad_value(key, value, "tasks are 13 and 16");
      }
      c.tasks.push_back(static_cast<int>(u));
    }
    if (c.tasks.empty()) bad_value(key, value);
  } else if (name == "modes") {
    c.modes.clear();
    try {
      for (const auto& item : split_list(value)) c.modes.push_back(parse_mode(item));
    } catch (const Error&) {
      bad_value(key, value, "modes are in_air, on_paper, both");
    }
    if (c.modes.empty()) bad_value(key, value);
  } else if (name == "budgets") {
    c.budgets.clear();
    for (const auto& item : split_list(value)) {
      if (!text::parse_u64(item, u)) bad_value(key, value);
      c.budgets.push_back(u);
    }
    if (c.budgets.empty()) bad_value(key, value);
  } else if (name == "seed") {
    if (!text::parse_u64(value, c.seed)) bad_value(key, value);
  } else if (name == "test_fraction") {
    if (!text::parse_double(value, c.test_fraction) || !(c.test_fraction > 0.0) ||
        !(c.test_fraction < 1.0)) {
      bad_value(key, value, "must lie in (0, 1)");
    }
  } else if (name == "threads") {
    if (!text::parse_u64(value, u) || u == 0) bad_value(key, value, "must be positive");
    c.threads = u;
  } else if (name == "save_ensembles") {
    if (!text::parse_bool(value, c.save_ensembles)) bad_value(key, value);
  } else if (name == "save_classifiers") {
    if (!text::parse_bool(value, c.save_classifiers)) bad_value(key, value);
  } else {
    throw ConfigError("unknown key: " + key);
  }
}

// Generator seeds are derived from run.seed, so generator.seed is not a key.
const std::set<std::string>& generator_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    for (const auto& [name, v] : GeneratorConfig{}.to_map()) {
      if (name != "seed") k.insert(name);
    }
    return k;
  }();
  return keys;
}

const std::set<std::string>& clf_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    for (const auto& [name, v] : ClfConfig{}.to_map()) k.insert(name);
    return k;
  }();
  return keys;
}

struct Builder {
  RunConfig config;
  std::map<std::string, std::string> generator = GeneratorConfig{}.to_map();
  std::map<std::string, std::string> clf = ClfConfig{}.to_map();

  void set(const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError("unknown key: " + key);
    const auto section = key.substr(0, dot);
    const auto name = key.substr(dot + 1);
    if (section == "run") {
      set_run_key(config, name, value);
    } else if (section == "generator") {
      if (!generator_keys().contains(name)) throw ConfigError("unknown key: " + key);
      try {
        GeneratorConfig::from_map({{name, value}});
      } catch (const Error&) {
        bad_value(key, value);
      }
      generator[name] = value;
    } else if (section == "clf") {
      if (!clf_keys().contains(name)) throw ConfigError("unknown key: " + key);
      try {
        ClfConfig::from_map({{name, value}});
      } catch (const Error&) {
        bad_value(key, value);
      }
      clf[name] = value;
    } else {
      throw ConfigError("unknown key: " + key);
    }
  }

  RunConfig finish() {
    config.generator = GeneratorConfig::from_map(generator);
    config.clf = ClfConfig::from_map(clf);
    try {
      config.generator.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("generator settings: ") + e.what());
    }
    try {
      config.clf.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("clf settings: ") + e.what());
    }
    if (config.corpus_root.empty()) throw ConfigError("missing key: run.corpus_root");
    return config;
  }
};

}  // namespace

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["run.corpus_root"] = corpus_root.string();
  m["run.output_dir"] = output_dir.string();
  m["run.tasks"] = join(tasks, [](int t) { return std::to_string(t); });
  m["run.modes"] = join(modes, [](MovementMode mode) { return std::string(mode_name(mode)); });
  m["run.budgets"] = join(budgets, [](std::size_t b) { return std::to_string(b); });
  m["run.seed"] = std::to_string(seed);
  m["run.test_fraction"] = text::format_double(test_fraction);
  m["run.threads"] = std::to_string(threads);
  m["run.save_ensembles"] = save_ensembles ? "true" : "false";
  m["run.save_classifiers"] = save_classifiers ? "true" : "false";
  for (const auto& [k, v] : generator.to_map()) {
    if (k != "seed") m["generator." + k] = v;
  }
  for (const auto& [k, v] : clf.to_map()) m["clf." + k] = v;
  return m;
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
  Builder builder;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
    }
    builder.set(std::string(text::trim(line.substr(0, eq))),
                std::string(text::trim(line.substr(eq + 1))));
  }
  for (const auto& [key, value] : overrides) builder.set(key, value);
  return builder.finish();
}

RunConfig load_config(const std::filesystem::path& file, const Overrides& overrides) {
  if (file.empty()) return parse_config("", overrides);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string render_config(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.to_map()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace airink
