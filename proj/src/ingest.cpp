#include "corrviz/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace corrviz::ingest {

using nlohmann::json;
using stats::SymMatrix;

void validate(const DataSet& dataset) {
    const std::size_t n = dataset.y.size();
    if (n == 0) throw ValidationError("dataset is empty");
    if (dataset.x.size() != n) {
        throw ValidationError("length mismatch: " + std::to_string(dataset.x.size()) +
                              " x values vs " + std::to_string(n) + " y values");
    }
    if (dataset.cov.size() != n) {
        throw ValidationError("length mismatch: covariance is " +
                              std::to_string(dataset.cov.size()) + "x" +
                              std::to_string(dataset.cov.size()) + " for " +
                              std::to_string(n) + " points");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(dataset.x[i] < dataset.x[i + 1])) {
            throw ValidationError("x values not strictly increasing at index " +
                                  std::to_string(i + 1));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(dataset.y[i]) || !std::isfinite(dataset.x[i])) {
            throw ValidationError("non-finite coordinate at index " + std::to_string(i));
        }
        if (dataset.cov(i, i) <= 0.0) {
            throw ValidationError("covariance diagonal not positive at index " +
                                  std::to_string(i));
        }
    }
    if (!linalg::is_psd(dataset.cov)) {
        throw ValidationError("covariance matrix is not positive semi-definite");
    }
    for (const auto& model : dataset.models) {
        if (model.values.size() != n) {
            throw ValidationError("model '" + model.name + "' has " +
                                  std::to_string(model.values.size()) + " values, expected " +
                                  std::to_string(n));
        }
    }
}

namespace {

std::vector<double> parse_number_array(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw ParseError("missing or non-array field '" + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ParseError("non-numeric entry in '" + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

DataSet load_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"] != "1") {
        throw ParseError("missing or unsupported schema_version (expected \"1\")");
    }

    DataSet d{{}, {}, SymMatrix(1), {}, "", ""};
    d.x = parse_number_array(j, "x");
    d.y = parse_number_array(j, "y");

    if (!j.contains("covariance") || !j["covariance"].is_array()) {
        throw ParseError("missing or non-array field 'covariance'");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["covariance"]) {
        if (!row.is_array()) throw ParseError("covariance rows must be arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError("non-numeric covariance entry");
            r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
    }
    try {
        d.cov = SymMatrix::from_rows(rows);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("covariance: ") + e.what());
    }

    if (j.contains("models")) {
        for (const auto& m : j["models"]) {
            stats::Model model;
            if (!m.contains("name") || !m["name"].is_string()) {
                throw ParseError("model without a name");
            }
            model.name = m["name"].get<std::string>();
            model.values = parse_number_array(m, "values");
            d.models.push_back(std::move(model));
        }
    }
    if (j.contains("xlabel")) d.xlabel = j["xlabel"].get<std::string>();
    if (j.contains("ylabel")) d.ylabel = j["ylabel"].get<std::string>();

    validate(d);
    return d;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + s +
                         "'");
    }
}

DataSet load_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t ncols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (!header_seen) {
            if (fields.size() < 3 || fields[0] != "x" || fields[1] != "y") {
                throw ParseError("expected CSV header 'x,y,cov0..covN-1'");
            }
            ncols = fields.size();
            header_seen = true;
            continue;
        }
        if (fields.size() != ncols) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(ncols) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(parse_double(f, line_no));
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError("empty CSV input");
    const std::size_t n = rows.size();
    if (ncols != n + 2) {
        throw ParseError("covariance width " + std::to_string(ncols - 2) +
                         " does not match " + std::to_string(n) + " rows");
    }

    DataSet d{{}, {}, SymMatrix(n), {}, "", ""};
    std::vector<std::vector<double>> cov(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        d.x.push_back(rows[i][0]);
        d.y.push_back(rows[i][1]);
        for (std::size_t j = 0; j < n; ++j) cov[i][j] = rows[i][2 + j];
    }
    try {
        d.cov = SymMatrix::from_rows(cov);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("covariance: ") + e.what());
    }
    validate(d);
    return d;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DataSet load_dataset(const std::string& text, Format format) {
    return format == Format::json ? load_json(text) : load_csv(text);
}

DataSet load_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const Format fmt = path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
                           ? Format::csv
                           : Format::json;
    return load_dataset(buf.str(), fmt);
}

std::string save_dataset(const DataSet& dataset, Format format) {
    const std::size_t n = dataset.size();
    if (format == Format::json) {
        json j;
        j["schema_version"] = "1";
        j["x"] = dataset.x;
        j["y"] = dataset.y;
        json cov = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < n; ++k) row.push_back(dataset.cov(i, k));
            cov.push_back(std::move(row));
        }
        j["covariance"] = std::move(cov);
        if (!dataset.models.empty()) {
            json models = json::array();
            for (const auto& m : dataset.models) {
                models.push_back({{"name", m.name}, {"values", m.values}});
            }
            j["models"] = std::move(models);
        }
        if (!dataset.xlabel.empty()) j["xlabel"] = dataset.xlabel;
        if (!dataset.ylabel.empty()) j["ylabel"] = dataset.ylabel;
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "x,y";
    for (std::size_t k = 0; k < n; ++k) out << ",cov" << k;
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << fmt17(dataset.x[i]) << "," << fmt17(dataset.y[i]);
        for (std::size_t k = 0; k < n; ++k) out << "," << fmt17(dataset.cov(i, k));
        out << "\n";
    }
    return out.str();
}

void save_dataset_file(const DataSet& dataset, const std::string& path) {
    const Format fmt = path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
                           ? Format::csv
                           : Format::json;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << save_dataset(dataset, fmt);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace corrviz::ingest
