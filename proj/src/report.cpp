#include "stylodet/report.hpp"

#include <cstdio>
#include <ostream>

#include "stylodet/common.hpp"

namespace stylodet {

namespace {

nlohmann::ordered_json rows_json(const std::vector<MetricRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["domain"] = r.domain;
    j["model"] = r.model;
    j["metric"] = r.metric;
    j["mean"] = r.mean;
    j["se"] = r.se;
    j["n"] = r.n;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<MetricRow> rows_from_json(const nlohmann::json& arr) {
  std::vector<MetricRow> rows;
  for (const auto& j : arr) {
    rows.push_back({j.at("domain").get<std::string>(), j.at("model").get<std::string>(),
                    j.at("metric").get<std::string>(), j.at("mean").get<double>(), j.at("se").get<double>(),
                    j.at("n").get<std::size_t>()});
  }
  return rows;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["protocol"] = report.protocol;
  j["config"] = report.config;
  j["per_domain"] = rows_json(report.per_domain);
  j["overall"] = rows_json(report.overall);
  j["warnings"] = report.warnings;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.protocol = j.at("protocol").get<std::string>();
    r.config = j.at("config");
    r.per_domain = rows_from_json(j.at("per_domain"));
    r.overall = rows_from_json(j.at("overall"));
    if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedRecord, std::string("bad report: ") + e.what());
  }
  return r;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "section,domain,model,metric,mean,se,n\n";
  auto emit = [&](const char* section, const std::vector<MetricRow>& rows) {
    for (const auto& r : rows) {
      out << section << ',' << csv_field(r.domain) << ',' << csv_field(r.model) << ',' << r.metric << ','
          << number(r.mean) << ',' << number(r.se) << ',' << r.n << '\n';
    }
  };
  emit("per_domain", report.per_domain);
  emit("overall", report.overall);
}

}  // namespace stylodet
