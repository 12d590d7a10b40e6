#include "airink/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "airink/error.hpp"
#include "airink/rng.hpp"
#include "text.hpp"

namespace airink {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kHeader = "t,x,y,pen_down,pressure";

using text::format_double;
using text::parse_double;
using text::trim;

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

Corpus::Corpus(std::vector<Recording> recordings) {
  for (auto& r : recordings) add(std::move(r));
}

void Corpus::add(Recording rec) {
  rec.validate();
  if (auto it = labels_.find(rec.subject_id); it != labels_.end()) {
    if (it->second != rec.label) {
      throw InvalidArgument("subject " + rec.subject_id + " appears with two class labels");
    }
    for (auto pos : index_[rec.subject_id]) {
      if (recordings_[pos].task_id == rec.task_id) {
        throw InvalidArgument("duplicate recording for subject " + rec.subject_id + " task " +
                              std::to_string(rec.task_id));
      }
    }
  }
  labels_[rec.subject_id] = rec.label;
  index_[rec.subject_id].push_back(recordings_.size());
  recordings_.push_back(std::move(rec));
}

std::vector<std::string> Corpus::subjects() const {
  std::vector<std::string> out;
  out.reserve(index_.size());
  for (const auto& [id, _] : index_) out.push_back(id);
  return out;
}

std::vector<std::string> Corpus::subjects(Label label) const {
  std::vector<std::string> out;
  for (const auto& [id, l] : labels_) {
    if (l == label) out.push_back(id);
  }
  return out;
}

std::size_t Corpus::subject_count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      labels_.begin(), labels_.end(), [label](const auto& kv) { return kv.second == label; }));
}

Label Corpus::subject_label(const std::string& subject_id) const {
  auto it = labels_.find(subject_id);
  if (it == labels_.end()) throw InvalidArgument("unknown subject " + subject_id);
  return it->second;
}

const std::vector<std::size_t>& Corpus::positions(const std::string& subject_id) const {
  auto it = index_.find(subject_id);
  if (it == index_.end()) throw InvalidArgument("unknown subject " + subject_id);
  return it->second;
}

std::set<int> Corpus::tasks() const {
  std::set<int> out;
  for (const auto& r : recordings_) out.insert(r.task_id);
  return out;
}

Corpus Corpus::with_task(int task_id) const {
  Corpus out;
  for (const auto& r : recordings_) {
    if (r.task_id == task_id) out.add(r);
  }
  return out;
}

Corpus Corpus::with_subjects(const std::set<std::string>& subject_ids) const {
  Corpus out;
  for (const auto& r : recordings_) {
    if (subject_ids.count(r.subject_id)) out.add(r);
  }
  return out;
}

std::string Corpus::digest() const {
  // FNV-1a over a canonical rendering, independent of insertion order.
  std::vector<const Recording*> order;
  for (const auto& r : recordings_) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const Recording* a, const Recording* b) {
    return std::tie(a->subject_id, a->task_id) < std::tie(b->subject_id, b->task_id);
  });
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto* r : order) {
    feed(r->subject_id);
    feed(label_name(r->label));
    feed(std::to_string(r->task_id));
    feed(serialize_recording(*r));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Recording parse_recording(std::istream& in, std::string subject_id, int task_id, Label label) {
  Recording rec;
  rec.subject_id = std::move(subject_id);
  rec.task_id = task_id;
  rec.label = label;

  std::string raw;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (!seen_header) {
      if (line.empty()) continue;
      if (line != kHeader) {
        throw ParseError(line_error(line_no, "expected header '" + std::string(kHeader) + "'"));
      }
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::array<std::string_view, 5> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                            : comma - start);
      if (count < fields.size()) fields[count] = field;
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 5) {
      throw ParseError(line_error(line_no, "expected 5 columns, found " + std::to_string(count)));
    }
    static constexpr std::string_view names[] = {"t", "x", "y", "pen_down", "pressure"};
    double v[5];
    for (std::size_t i = 0; i < 5; ++i) {
      if (!parse_double(fields[i], v[i])) {
        throw ParseError(line_error(line_no, "non-numeric " + std::string(names[i]) + " '" +
                                                 std::string(trim(fields[i])) + "'"));
      }
    }
    if (v[3] != 0.0 && v[3] != 1.0) {
      throw ParseError(line_error(line_no, "pen_down must be 0 or 1"));
    }
    PointSample s{v[0], v[1], v[2], static_cast<int>(v[3]), v[4]};
    if (s.pressure < 0.0) throw ParseError(line_error(line_no, "negative pressure"));
    if (s.pen_down == 0 && s.pressure != 0.0) {
      throw ParseError(line_error(line_no, "non-zero pressure with the pen lifted"));
    }
    if (!rec.samples.empty() && s.t < rec.samples.back().t) {
      throw ParseError(line_error(line_no, "timestamp decreases"));
    }
    rec.samples.push_back(s);
  }
  if (rec.samples.empty()) throw ParseError("no samples");
  if (task_id < kMinTask || task_id > kMaxTask) {
    throw ParseError("task id " + std::to_string(task_id) + " outside 1..25");
  }
  return rec;
}

Recording parse_recording(std::string_view text, std::string subject_id, int task_id,
                          Label label) {
  std::istringstream in{std::string(text)};
  return parse_recording(in, std::move(subject_id), task_id, label);
}

std::string serialize_recording(const Recording& rec) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& s : rec.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.x);
    out += ',';
    out += format_double(s.y);
    out += ',';
    out += s.pen_down ? '1' : '0';
    out += ',';
    out += format_double(s.pressure);
    out += '\n';
  }
  return out;
}

fs::path recording_path(const Recording& rec) {
  char name[16];
  std::snprintf(name, sizeof name, "task_%02d.csv", rec.task_id);
  return fs::path(std::string(label_name(rec.label))) / rec.subject_id / name;
}

Corpus load_corpus(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("corpus root " + root.string() + " is not a readable directory");
  }
  static const std::regex task_file(R"(task_(\d\d)\.csv)");

  struct Found {
    fs::path path;
    std::string subject;
    int task;
    Label label;
  };
  std::vector<Found> found;
  for (Label label : kLabels) {
    const auto class_dir = root / std::string(label_name(label));
    if (!fs::exists(class_dir)) continue;
    fs::directory_iterator subjects(class_dir, ec);
    if (ec) throw IoError("cannot read " + class_dir.string() + ": " + ec.message());
    for (const auto& subject : subjects) {
      if (!subject.is_directory()) continue;
      fs::directory_iterator files(subject.path(), ec);
      if (ec) throw IoError("cannot read " + subject.path().string() + ": " + ec.message());
      for (const auto& file : files) {
        std::smatch m;
        const auto name = file.path().filename().string();
        if (!file.is_regular_file() || !std::regex_match(name, m, task_file)) continue;
        found.push_back({file.path(), subject.path().filename().string(), std::stoi(m[1]),
                         label});
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const Found& a, const Found& b) { return a.path < b.path; });

  Corpus corpus;
  std::vector<std::string> failures;
  for (const auto& f : found) {
    std::ifstream in(f.path);
    if (!in) {
      failures.push_back(f.path.string() + ": unreadable");
      continue;
    }
    try {
      corpus.add(parse_recording(in, f.subject, f.task, f.label));
    } catch (const Error& e) {
      failures.push_back(f.path.string() + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) + " file(s) failed to load";
    for (const auto& f : failures) msg += "\n  " + f;
    throw ParseError(msg);
  }
  return corpus;
}

void write_manifest(const Corpus& corpus, const fs::path& path) {
  std::vector<const Recording*> order;
  for (const auto& r : corpus.recordings()) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const Recording* a, const Recording* b) {
    return std::tie(a->subject_id, a->task_id) < std::tie(b->subject_id, b->task_id);
  });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "subject_id,label,task_id,path\n";
  for (const auto* r : order) {
    out << r->subject_id << ',' << label_name(r->label) << ',' << r->task_id << ','
        << recording_path(*r).generic_string() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
  for (const auto& r : corpus.recordings()) {
    const auto path = root / recording_path(r);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << serialize_recording(r);
    if (!out) throw IoError("failed writing " + path.string());
  }
  write_manifest(corpus, root / "manifest.csv");
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

std::map<Label, std::vector<std::string>> shuffled_by_class(const Corpus& corpus,
                                                            std::uint64_t seed) {
  std::map<Label, std::vector<std::string>> out;
  for (Label label : kLabels) {
    auto ids = corpus.subjects(label);
    RandomStream rng(derive_seed(seed, label_name(label)));
    shuffle(ids.begin(), ids.end(), rng);
    out[label] = std::move(ids);
  }
  return out;
}

}  // namespace

SubjectPartition subject_split_ids(const Corpus& corpus, double test_fraction,
                                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test fraction must lie in (0, 1)");
  }
  const std::size_t n = corpus.subject_count();
  if (n < 2) throw DegenerateSplit("need at least 2 subjects, corpus has " + std::to_string(n));
  for (Label label : kLabels) {
    if (corpus.subject_count(label) == 0) {
      throw DegenerateSplit("class " + std::string(label_name(label)) + " has no subjects");
    }
  }

  const auto n_test =
      static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n) + 1e-9));

  // Largest-remainder apportionment of the test quota across classes.
  std::map<Label, std::size_t> quota;
  std::vector<std::pair<double, Label>> remainders;
  std::size_t assigned = 0;
  for (Label label : kLabels) {
    const double exact = test_fraction * static_cast<double>(corpus.subject_count(label));
    const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
    quota[label] = base;
    assigned += base;
    remainders.emplace_back(exact - static_cast<double>(base), label);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n_test && i < remainders.size(); ++i) {
    const Label label = remainders[i].second;
    if (quota[label] < corpus.subject_count(label)) {
      ++quota[label];
      ++assigned;
    }
  }
  while (assigned > n_test) {
    // Only reachable through the rounding guard above; trim the largest quota.
    auto it = std::max_element(quota.begin(), quota.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
    --it->second;
    --assigned;
  }

  SubjectPartition part;
  for (auto& [label, ids] : shuffled_by_class(corpus, seed)) {
    const auto k = quota[label];
    part.test.insert(part.test.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
    part.train.insert(part.train.end(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end());
  }
  std::sort(part.train.begin(), part.train.end());
  std::sort(part.test.begin(), part.test.end());
  return part;
}

std::pair<Corpus, Corpus> subject_split(const Corpus& corpus, double test_fraction,
                                        std::uint64_t seed) {
  const auto part = subject_split_ids(corpus, test_fraction, seed);
  return {corpus.with_subjects({part.train.begin(), part.train.end()}),
          corpus.with_subjects({part.test.begin(), part.test.end()})};
}

std::vector<SubjectPartition> k_fold_ids(const Corpus& corpus, std::size_t n_folds,
                                         std::uint64_t seed) {
  if (n_folds < 2) throw InvalidArgument("need at least 2 folds");
  const std::size_t n = corpus.subject_count();
  if (n < n_folds) {
    throw InsufficientSubjects(std::to_string(n) + " subjects cannot fill " +
                               std::to_string(n_folds) + " folds");
  }
  // Classes are dealt round-robin in sequence so fold sizes differ by at most
  // one and each fold stays close to the class ratio.
  std::vector<std::vector<std::string>> validation(n_folds);
  std::size_t next = 0;
  for (auto& [label, ids] : shuffled_by_class(corpus, seed)) {
    for (auto& id : ids) {
      validation[next].push_back(std::move(id));
      next = (next + 1) % n_folds;
    }
  }
  std::vector<SubjectPartition> folds(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    folds[f].test = validation[f];
    for (std::size_t g = 0; g < n_folds; ++g) {
      if (g != f) folds[f].train.insert(folds[f].train.end(), validation[g].begin(),
                                        validation[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
    std::sort(folds[f].test.begin(), folds[f].test.end());
  }
  return folds;
}

std::vector<std::pair<Corpus, Corpus>> k_folds(const Corpus& corpus, std::size_t n_folds,
                                               std::uint64_t seed) {
  std::vector<std::pair<Corpus, Corpus>> out;
  for (const auto& fold : k_fold_ids(corpus, n_folds, seed)) {
    out.emplace_back(corpus.with_subjects({fold.train.begin(), fold.train.end()}),
                     corpus.with_subjects({fold.test.begin(), fold.test.end()}));
  }
  return out;
}

}  // namespace airink
