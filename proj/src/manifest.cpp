#include "stylodet/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "stylodet/common.hpp"

namespace stylodet {

nlohmann::ordered_json document_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  j["author"] = doc.author;
  j["label"] = doc.source.label();
  j["domain"] = doc.domain;
  if (doc.timestamp) j["timestamp"] = *doc.timestamp;
  j["token_count"] = doc.token_count;
  j["hard_cut"] = doc.hard_cut;
  return j;
}

Document document_from_json(const nlohmann::json& j, const std::string& where) {
  Document d;
  try {
    d.id = j.at("id").get<std::string>();
    d.text = j.at("text").get<std::string>();
    d.author = j.at("author").get<std::string>();
    d.source = SourceLabel::parse(j.at("label").get<std::string>());
    d.domain = j.at("domain").get<std::string>();
    if (j.contains("timestamp") && !j.at("timestamp").is_null()) d.timestamp = j.at("timestamp").get<std::int64_t>();
    if (j.contains("token_count")) d.token_count = j.at("token_count").get<std::size_t>();
    if (j.contains("hard_cut")) d.hard_cut = j.at("hard_cut").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedRecord, where + ": " + e.what());
  }
  if (d.text.empty()) throw Error(Errc::kEmptyDocument, where + ": empty document '" + d.id + "'");
  return d;
}

void write_manifest(std::ostream& out, const std::vector<Episode>& episodes) {
  for (const auto& ep : episodes) {
    nlohmann::ordered_json j;
    j["id"] = ep.id;
    j["author"] = ep.author;
    j["label"] = ep.source.label();
    j["domain"] = ep.domain;
    auto docs = nlohmann::ordered_json::array();
    for (const auto& d : ep.documents) docs.push_back(document_json(d));
    j["documents"] = std::move(docs);
    out << j.dump() << '\n';
  }
}

std::vector<Episode> read_manifest(std::istream& in, const std::string& source_name) {
  std::vector<Episode> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      Episode ep;
      ep.id = j.at("id").get<std::string>();
      ep.author = j.at("author").get<std::string>();
      ep.source = SourceLabel::parse(j.at("label").get<std::string>());
      ep.domain = j.at("domain").get<std::string>();
      for (const auto& d : j.at("documents")) ep.documents.push_back(document_from_json(d, where));
      if (ep.documents.empty()) throw Error(Errc::kMalformedRecord, where + ": episode has no documents");
      out.push_back(std::move(ep));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + ": " + e.what());
    }
  }
  return out;
}

std::vector<Episode> read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open manifest " + path);
  return read_manifest(in, path);
}

std::map<std::string, Episode> read_paraphrases(std::istream& in, const std::vector<Episode>& originals,
                                                const Tokenizer& tokenizer, const SentenceSegmenter& segmenter,
                                                std::size_t max_tokens, const std::string& source_name) {
  std::unordered_map<std::string, const Episode*> by_id;
  for (const auto& ep : originals) by_id.emplace(ep.id, &ep);

  std::map<std::string, Episode> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("query_id").get<std::string>();
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw Error(Errc::kMalformedRecord, where + ": unknown episode '" + id + "'");
      Episode ep = *it->second;
      ep.id = id;
      ep.documents.clear();
      std::size_t k = 0;
      for (const auto& d : j.at("documents")) {
        Document doc;
        if (d.is_string()) {
          doc.text = d.get<std::string>();
        } else {
          doc.text = d.at("text").get<std::string>();
          if (d.contains("id")) doc.id = d.at("id").get<std::string>();
        }
        if (doc.id.empty()) doc.id = id + "/paraphrase/" + std::to_string(k);
        doc.author = ep.author;
        doc.source = ep.source;
        doc.domain = ep.domain;
        auto cut = truncate_to_boundary(doc.text, max_tokens, tokenizer, segmenter);
        doc.text = std::move(cut.text);
        doc.token_count = cut.token_count;
        doc.hard_cut = cut.hard_cut;
        ep.documents.push_back(std::move(doc));
        ++k;
      }
      if (ep.documents.empty()) throw Error(Errc::kMalformedRecord, where + ": paraphrase has no documents");
      if (!out.emplace(id, std::move(ep)).second) {
        throw Error(Errc::kDuplicateId, where + ": duplicate paraphrase for '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedRecord, where + ": " + e.what());
    } catch (const Error& e) {
      if (std::string(e.what()).rfind(where, 0) == 0) throw;
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stylodet
