#include "powidx/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace powidx::io {

using nlohmann::json;

namespace {

ParseError to_parse_error(const json::parse_error& e, const std::string& text) {
  // byte offset -> line / column
  int line = 1, col = 1;
  const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
  for (std::size_t i = 0; i + 1 <= stop && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return ParseError(e.what(), line, col);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw to_parse_error(e, text);
  }
}

}  // namespace

WeightedLTF game_from_json_text(const std::string& text) {
  json j = parse(text);
  if (!j.contains("weights") || !j["weights"].is_array())
    throw std::invalid_argument("game json: missing weights array");
  std::vector<double> w = j["weights"].get<std::vector<double>>();
  if (j.contains("quota")) {
    return from_game(GameSpec(std::move(w), j["quota"].get<double>()));
  }
  if (j.contains("threshold")) {
    if (j.value("encoding", "") != std::string("pm1"))
      throw std::invalid_argument("game json: threshold form requires \"encoding\":\"pm1\"");
    return WeightedLTF(std::move(w), j["threshold"].get<double>());
  }
  throw std::invalid_argument("game json: need either quota or threshold");
}

WeightedLTF load_game(const std::string& path) { return game_from_json_text(read_file(path)); }

std::string game_to_json_text(const WeightedLTF& f) {
  json j;
  j["weights"] = f.weights;
  j["threshold"] = f.threshold;
  j["encoding"] = "pm1";
  return j.dump(2) + "\n";
}

std::string index_vector_to_json_text(const IndexVector& v) {
  json j;
  j["kind"] = index_kind_name(v.kind);
  j["n"] = v.n;
  if (v.p) j["p"] = *v.p;
  j["values"] = v.values;
  return j.dump(2) + "\n";
}

IndexVector index_vector_from_json_text(const std::string& text) {
  json j = parse(text);
  IndexVector v;
  v.kind = index_kind_from_name(j.at("kind").get<std::string>());
  v.n = j.at("n").get<std::size_t>();
  if (j.contains("p")) v.p = j["p"].get<double>();
  v.values = j.at("values").get<std::vector<double>>();
  const std::size_t want = v.has_slot0() ? v.n + 1 : v.n;
  if (v.values.size() != want)
    throw std::invalid_argument("index vector json: wrong number of values");
  return v;
}

std::string partial_to_json_text(const PartialIndexVector& v) {
  json j;
  j["kind"] = index_kind_name(v.kind);
  j["n"] = v.n;
  std::vector<std::size_t> idx;
  std::vector<double> vals;
  for (const auto& [i, val] : v.entries) {
    idx.push_back(i);
    vals.push_back(val);
  }
  j["indices"] = idx;
  j["values"] = vals;
  return j.dump(2) + "\n";
}

PartialIndexVector partial_from_json_text(const std::string& text) {
  json j = parse(text);
  PartialIndexVector v;
  v.kind = index_kind_from_name(j.at("kind").get<std::string>());
  v.n = j.at("n").get<std::size_t>();
  std::vector<std::size_t> idx = j.at("indices").get<std::vector<std::size_t>>();
  std::vector<double> vals = j.at("values").get<std::vector<double>>();
  if (idx.size() != vals.size())
    throw std::invalid_argument("partial vector json: indices/values length mismatch");
  for (std::size_t t = 0; t < idx.size(); ++t) v.entries.emplace_back(idx[t], vals[t]);
  std::sort(v.entries.begin(), v.entries.end());
  v.validate();
  return v;
}

PartialIndexVector load_partial(const std::string& path) {
  return partial_from_json_text(read_file(path));
}

std::string index_vector_to_csv(const IndexVector& v) {
  std::ostringstream os;
  os << "index,value\n";
  os.precision(17);
  const std::size_t lo = v.has_slot0() ? 0 : 1;
  for (std::size_t i = lo; i <= v.n; ++i) os << i << "," << v.value(i) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace powidx::io
