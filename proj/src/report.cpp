#include "slicelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace slicelab {
namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

std::string number_map(const std::map<std::string, double>& m,
                       const std::string& indent) {
    if (m.empty()) return "{}";
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : m) {
        out += first ? "\n" : ",\n";
        out += indent + "  " + quote(k) + ": " + fmt(v);
        first = false;
    }
    return out + "\n" + indent + "}";
}

std::string number_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out + "]";
}

std::string report_object(const InequalityReport& r, const std::string& indent) {
    const std::string in2 = indent + "  ";
    std::string out = "{\n";
    out += in2 + "\"inequality_id\": " + quote(r.inequality_id) + ",\n";
    out += in2 + "\"body\": " + quote(r.body_label) + ",\n";
    out += in2 + "\"density\": " + quote(r.density_label) + ",\n";
    out += in2 + "\"n\": " + std::to_string(r.n) + ",\n";
    out += in2 + "\"engine\": " + quote(r.engine) + ",\n";
    out += in2 + "\"seed\": " + std::to_string(r.seed) + ",\n";
    out += in2 + "\"lhs\": {\"value\": " + fmt(r.lhs.value) +
           ", \"err\": " + fmt(r.lhs.err) +
           ", \"method\": " + quote(r.lhs.method) +
           ", \"n_evals\": " + std::to_string(r.lhs.n_evals) + "},\n";
    out += in2 + "\"rhs\": " + fmt(r.rhs) + ",\n";
    out += in2 + "\"rhs_components\": " + number_map(r.rhs_components, in2) + ",\n";
    out += in2 + "\"ratio\": " + fmt(r.ratio) + ",\n";
    out += in2 + "\"constant\": " + fmt(r.constant) + ",\n";
    out += in2 + "\"error_budget\": " + fmt(r.error_budget) + ",\n";
    out += in2 + "\"pass\": " + (r.pass ? "true" : "false") + ",\n";
    out += in2 + "\"retried\": " + (r.retried ? "true" : "false") + ",\n";
    if (!r.xi_star.empty())
        out += in2 + "\"xi_star\": " + number_array(r.xi_star) + ",\n";
    if (!r.box_t.empty()) out += in2 + "\"box_t\": " + number_array(r.box_t) + ",\n";
    if (!r.ellipsoid_axes.empty())
        out += in2 + "\"ellipsoid_axes\": " + number_array(r.ellipsoid_axes) + ",\n";
    out += in2 + "\"extras\": " + number_map(r.extras, in2) + "\n";
    return out + indent + "}";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    return out + "\"";
}

}  // namespace

std::string report_json(const InequalityReport& r) {
    return report_object(r, "") + "\n";
}

std::vector<std::pair<std::string, std::string>> check_documents(
    const std::vector<InequalityReport>& reports) {
    std::vector<std::pair<std::string, std::string>> docs;
    std::vector<std::string> order;
    for (const auto& r : reports)
        if (std::find(order.begin(), order.end(), r.inequality_id) == order.end())
            order.push_back(r.inequality_id);

    for (const auto& id : order) {
        std::string body = "{\n  \"inequality_id\": " + quote(id) +
                           ",\n  \"cells\": [";
        bool first = true;
        for (const auto& r : reports) {
            if (r.inequality_id != id) continue;
            body += first ? "\n    " : ",\n    ";
            body += report_object(r, "    ");
            first = false;
        }
        body += first ? "]\n}\n" : "\n  ]\n}\n";
        docs.emplace_back(id, std::move(body));
    }
    return docs;
}

std::string summary_csv(const std::vector<InequalityReport>& reports) {
    std::string out =
        "inequality_id,body,density,n,lhs,rhs,ratio,constant,pass,seed\n";
    for (const auto& r : reports) {
        out += csv_field(r.inequality_id) + ',' + csv_field(r.body_label) + ',' +
               csv_field(r.density_label) + ',' + std::to_string(r.n) + ',' +
               fmt(r.lhs.value) + ',' + fmt(r.rhs) + ',' + fmt(r.ratio) + ',' +
               fmt(r.constant) + ',' + (r.pass ? "true" : "false") + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

void write_experiment_reports(const ExperimentRun& run, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory: " + dir);

    auto write = [&](const fs::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << content;
    };

    write(fs::path(dir) / "summary.csv", summary_csv(run.reports));
    for (const auto& [id, doc] : check_documents(run.reports))
        write(fs::path(dir) / (id + ".json"), doc);
    if (!run.notices.empty()) {
        std::string text;
        for (const auto& n : run.notices) text += n + '\n';
        write(fs::path(dir) / "notices.txt", text);
    }
}

}  // namespace slicelab
