#include "frontlab/io.hpp"

#include <fstream>

#include "frontlab/config.hpp"
#include "frontlab/error.hpp"

namespace frontlab {

using nlohmann::json;

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(*root_, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + root_->string() + ": " + ec.message());
}

std::filesystem::path OutputDir::path(const std::string& name) { return *root_ / name; }

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + p.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + p.string());
}

}  // namespace

void OutputDir::write_json(const std::string& name, const json& j) {
    if (!enabled()) return;
    write_file(path(name), j.dump(2) + "\n");
    artifacts_.emplace_back(name, "json");
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<std::string> c;
        for (double v : r) c.push_back(format_real(v));
        cells.push_back(std::move(c));
    }
    write_csv(name, header, cells);
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    if (!enabled()) return;
    std::string text;
    for (size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
    text += "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + r[i];
        text += "\n";
    }
    write_file(path(name), text);
    artifacts_.emplace_back(name, "csv");
}

void OutputDir::write_gnuplot(const std::string& name, const std::string& csv, const std::string& title, int xcol,
                              const std::vector<int>& ycols, const std::vector<std::string>& header) {
    if (!enabled()) return;
    std::string s = "set datafile separator ','\nset key autotitle columnhead\n";
    s += "set title '" + title + "'\n";
    s += "set xlabel '" + header.at(xcol - 1) + "'\n";
    s += "plot ";
    for (size_t i = 0; i < ycols.size(); ++i) {
        if (i) s += ", \\\n     ";
        s += "'" + csv + "' using " + std::to_string(xcol) + ":" + std::to_string(ycols[i]) + " with lines";
    }
    s += "\npause -1\n";
    write_file(path(name), s);
    artifacts_.emplace_back(name, "gnuplot");
}

void OutputDir::write_manifest(const std::string& command, const json& resolved_config, const std::string& status) {
    if (!enabled()) return;
    json files = json::array();
    for (const auto& [f, k] : artifacts_) files.push_back({{"file", f}, {"kind", k}});
    json m = {{"command", command}, {"status", status}, {"config", resolved_config}, {"artifacts", files}};
    write_file(path("manifest.json"), m.dump(2) + "\n");
}

}  // namespace frontlab
