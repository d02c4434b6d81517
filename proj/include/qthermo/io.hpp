#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qthermo/workcost.hpp"

namespace qthermo {

using Json = nlohmann::json;

// {"dims":[...],"re":[[...]],"im":[[...]]}, row-major. Doubles are written with round-trip
// precision, so save/load is bit-exact.
Json operator_to_json(const Mat& m, const Dims& dims = {});
// `where` prefixes error messages (file path and field).
Mat operator_from_json(const Json& j, Dims* dims = nullptr, const std::string& where = "operator");

Json choi_to_json(const ChoiOperator& ch);
ChoiOperator choi_from_json(const Json& j, const std::string& where = "choi");

Json protocol_to_json(const Protocol& p);
Protocol protocol_from_json(const Json& j, const std::string& where = "protocol");

Json work_report_to_json(const WorkReport& r);
Json verification_to_json(const VerificationReport& r);
Json aep_to_json(const std::vector<AepPoint>& pts);
// Header: n,eps,value_bits,lower_bound,upper_bound
std::string aep_to_csv(const std::vector<AepPoint>& pts);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Mat load_operator(const std::string& path, Dims* dims = nullptr);
void save_operator(const std::string& path, const Mat& m, const Dims& dims = {});

}  // namespace qthermo
