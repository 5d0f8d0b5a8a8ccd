#include "qdzip/domain_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace qdzip {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path p(path);
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

Domain parse_domain(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw IoError(std::string("domain file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("curves") || !j.contains("grid"))
    throw IoError("domain file must carry \"curves\" and \"grid\"");
  if (!j["grid"].is_number_integer()) throw IoError("\"grid\" must be an integer");
  int grid = j["grid"].get<int>();
  std::vector<Curve> curves;
  for (const auto& jc : j["curves"]) {
    if (!jc.contains("coeffs") || !jc.contains("degree_offset"))
      throw IoError("curve entries need \"coeffs\" and \"degree_offset\"");
    int M = jc["degree_offset"].get<int>();
    std::vector<cplx> coeffs;
    for (const auto& pair : jc["coeffs"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw IoError("coefficients must be [re, im] pairs");
      coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    if (static_cast<int>(coeffs.size()) != 2 * M + 1)
      throw IoError("coefficient count must equal 2*degree_offset + 1");
    curves.emplace_back(std::move(coeffs));
  }
  return Domain(std::move(curves), grid);
}

Domain load_domain(const std::string& path) { return parse_domain(read_file(path)); }

std::string domain_to_json(const Domain& dom) {
  ordered_json j;
  j["curves"] = ordered_json::array();
  for (int k = 0; k < dom.connectivity(); ++k) {
    const Curve& c = dom.curve(k);
    ordered_json jc;
    ordered_json arr = ordered_json::array();
    for (const auto& v : c.coeffs()) arr.push_back({v.real(), v.imag()});
    jc["coeffs"] = std::move(arr);
    jc["degree_offset"] = c.degree();
    j["curves"].push_back(std::move(jc));
  }
  j["grid"] = dom.grid();
  return j.dump(2) + "\n";
}

void save_domain(const Domain& dom, const std::string& path) {
  write_file_atomic(path, domain_to_json(dom));
}

}  // namespace qdzip
