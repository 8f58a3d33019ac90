#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylodet/corpus.hpp"

namespace stylodet {

nlohmann::ordered_json document_json(const Document& doc);
Document document_from_json(const nlohmann::json& j, const std::string& where);

// One episode per line:
// {"id","author","label","domain","documents":[{"id","text",...,"token_count","hard_cut"}]}
void write_manifest(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_manifest(std::istream& in, const std::string& source_name = "<manifest>");
std::vector<Episode> read_manifest_file(const std::string& path);

// Paraphrase input, one line per paraphrased episode:
// {"query_id", "documents":[...]} where each document is a string or an
// object with "text" (and optionally "id"). Texts are truncated like the
// corpus; metadata is copied from the original episode, which must exist.
std::map<std::string, Episode> read_paraphrases(std::istream& in, const std::vector<Episode>& originals,
                                                const Tokenizer& tokenizer, const SentenceSegmenter& segmenter,
                                                std::size_t max_tokens,
                                                const std::string& source_name = "<paraphrases>");

}  // namespace stylodet
