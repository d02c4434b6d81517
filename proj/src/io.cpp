#include "qthermo/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace qthermo {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(where + ": missing field '" + key + "'");
    return *it;
}

Dims dims_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of positive integers");
    Dims d;
    for (const auto& x : j) {
        if (!x.is_number_integer() || x.get<long long>() < 1)
            throw ValidationError(where + ": expected an array of positive integers");
        d.push_back(x.get<int>());
    }
    return d;
}

Eigen::MatrixXd real_matrix(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ValidationError(where + ": ragged row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                throw ValidationError(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: not a number");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

Json rows_of(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

// JSON has no infinity; such values are written as null.
Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double number_from(const Json& j, const std::string& where) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    if (!j.is_number()) throw ValidationError(where + ": not a number");
    return j.get<double>();
}

}  // namespace

Json operator_to_json(const Mat& m, const Dims& dims) {
    Json j;
    j["dims"] = dims.empty() ? Dims{int(m.rows())} : dims;
    j["re"] = rows_of(m.real());
    j["im"] = rows_of(m.imag());
    return j;
}

Mat operator_from_json(const Json& j, Dims* dims, const std::string& where) {
    const Eigen::MatrixXd re = real_matrix(field(j, "re", where), where + ".re");
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
    if (j.contains("im")) im = real_matrix(j["im"], where + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw ValidationError(where + ": re and im shapes differ");
    if (re.rows() != re.cols()) throw DimensionError(where + ": matrix is not square");
    Dims d = j.contains("dims") ? dims_from_json(j["dims"], where + ".dims") : Dims{int(re.rows())};
    if (dims_product(d) != re.rows()) throw DimensionError(where + ".dims: product does not match the matrix size");
    if (dims) *dims = d;
    Mat m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

Json choi_to_json(const ChoiOperator& ch) {
    Json j = operator_to_json(ch.mat());
    j["in_dims"] = ch.in_dims();
    j["out_dims"] = ch.out_dims();
    return j;
}

ChoiOperator choi_from_json(const Json& j, const std::string& where) {
    Mat m = operator_from_json(j, nullptr, where);
    Dims in = dims_from_json(field(j, "in_dims", where), where + ".in_dims");
    Dims out = dims_from_json(field(j, "out_dims", where), where + ".out_dims");
    return ChoiOperator(std::move(m), std::move(in), std::move(out));
}

Json protocol_to_json(const Protocol& p) {
    Json j;
    j["target_error"] = p.target_error;
    j["ideal_work_bits"] = p.ideal_work_bits();
    j["integer_work_bits"] = p.integer_work_bits();
    j["d_battery_in"] = p.d_battery_in();
    j["d_battery_out"] = p.d_battery_out();
    Json stages = Json::array();
    for (const auto& s : p.stages) {
        Json st;
        st["label"] = s.label;
        st["choi"] = choi_to_json(s.operation.channel);
        st["gamma_in"] = operator_to_json(s.operation.gamma_in.mat());
        st["gamma_out"] = operator_to_json(s.operation.gamma_out.mat());
        st["gamma_system_in"] = operator_to_json(s.gamma_system_in);
        st["gamma_system_out"] = operator_to_json(s.gamma_system_out);
        st["d_battery_in"] = s.d_battery_in;
        st["d_battery_out"] = s.d_battery_out;
        st["system_in_dims"] = Dims{s.dA_in, s.dB_in};
        st["system_out_dims"] = Dims{s.dA_out, s.dB_out};
        st["ideal_work_bits"] = s.ideal_work_bits;
        st["integer_work_bits"] = s.integer_work_bits;
        stages.push_back(std::move(st));
    }
    j["stages"] = std::move(stages);
    return j;
}

Protocol protocol_from_json(const Json& j, const std::string& where) {
    Protocol p;
    p.target_error = number_from(field(j, "target_error", where), where + ".target_error");
    const Json& stages = field(j, "stages", where);
    if (!stages.is_array()) throw ValidationError(where + ".stages: expected an array");
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const std::string w = where + ".stages[" + std::to_string(k) + "]";
        const Json& st = stages[k];
        ProtocolStage s;
        s.label = field(st, "label", w).get<std::string>();
        s.operation = ThermoOperation(choi_from_json(field(st, "choi", w), w + ".choi"),
                                      DensityOperator(operator_from_json(field(st, "gamma_in", w), nullptr, w + ".gamma_in")),
                                      DensityOperator(operator_from_json(field(st, "gamma_out", w), nullptr, w + ".gamma_out")));
        s.gamma_system_in = operator_from_json(field(st, "gamma_system_in", w), nullptr, w + ".gamma_system_in");
        s.gamma_system_out = operator_from_json(field(st, "gamma_system_out", w), nullptr, w + ".gamma_system_out");
        s.d_battery_in = field(st, "d_battery_in", w).get<int>();
        s.d_battery_out = field(st, "d_battery_out", w).get<int>();
        Dims in = dims_from_json(field(st, "system_in_dims", w), w + ".system_in_dims");
        Dims out = dims_from_json(field(st, "system_out_dims", w), w + ".system_out_dims");
        if (in.size() != 2 || out.size() != 2) throw ValidationError(w + ": system dims must have two entries");
        s.dA_in = in[0];
        s.dB_in = in[1];
        s.dA_out = out[0];
        s.dB_out = out[1];
        s.ideal_work_bits = number_from(field(st, "ideal_work_bits", w), w + ".ideal_work_bits");
        s.integer_work_bits = number_from(field(st, "integer_work_bits", w), w + ".integer_work_bits");
        p.stages.push_back(std::move(s));
    }
    return p;
}

Json work_report_to_json(const WorkReport& r) {
    Json j;
    j["work_bits"] = number_or_null(r.work_bits);
    j["beta_b"] = r.beta_b;
    j["epsilon"] = r.epsilon;
    j["method"] = to_string(r.method);
    Json d = Json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = number_or_null(v);
    j["diagnostics"] = std::move(d);
    return j;
}

Json verification_to_json(const VerificationReport& r) {
    return Json{{"covariance_residual", r.covariance_residual},
                {"achieved_error", r.achieved_error},
                {"work_bits", r.work_bits},
                {"integer_work_bits", r.integer_work_bits},
                {"pass", r.pass}};
}

Json aep_to_json(const std::vector<AepPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts)
        a.push_back(Json{{"n", p.n},
                         {"eps", p.eps},
                         {"value_bits", p.value_bits},
                         {"lower_bound", p.lower_bound},
                         {"upper_bound", number_or_null(p.upper_bound)},
                         {"bounds_hold", p.bounds_hold}});
    return a;
}

std::string aep_to_csv(const std::vector<AepPoint>& pts) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    os << "n,eps,value_bits,lower_bound,upper_bound\n";
    for (const auto& p : pts)
        os << p.n << ',' << p.eps << ',' << p.value_bits << ',' << p.lower_bound << ',' << p.upper_bound << '\n';
    return os.str();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": malformed JSON (" + e.what() + ")");
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path + ": cannot write file");
    out << text;
}

Mat load_operator(const std::string& path, Dims* dims) { return operator_from_json(read_json_file(path), dims, path); }

void save_operator(const std::string& path, const Mat& m, const Dims& dims) {
    write_text_file(path, operator_to_json(m, dims).dump() + "\n");
}

}  // namespace qthermo
