#pragma once

// JSON / CSV serialization of games and index vectors.
//
// Game files: {"weights":[...], "quota": q} for the 0/1 coalition view, or
// {"weights":[...], "threshold": t, "encoding":"pm1"} for the +/-1 view.
// Index vectors: {"kind","n","p"?,"values"}; Chow-family vectors carry n+1
// values with the degree-0 coefficient first, Shapley vectors carry n.
// Partial vectors add "indices". CSV export has the header `index,value`.

#include <stdexcept>
#include <string>

#include "powidx/ltf.hpp"
#include "powidx/power_indices.hpp"

namespace powidx::io {

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), column(col_) {}
};

WeightedLTF game_from_json_text(const std::string& text);
WeightedLTF load_game(const std::string& path);
std::string game_to_json_text(const WeightedLTF& f);

std::string index_vector_to_json_text(const IndexVector& v);
IndexVector index_vector_from_json_text(const std::string& text);

std::string partial_to_json_text(const PartialIndexVector& v);
PartialIndexVector partial_from_json_text(const std::string& text);
PartialIndexVector load_partial(const std::string& path);

std::string index_vector_to_csv(const IndexVector& v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a over the file bytes, hex; used by the run manifest
std::string digest_hex(const std::string& bytes);

}  // namespace powidx::io
