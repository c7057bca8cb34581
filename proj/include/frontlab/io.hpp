#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/polymat.hpp"
#include "json.hpp"

namespace frontlab {

nlohmann::json to_json(cplx z);

/// Run output directory; every file written through it is listed in manifest.json.
class OutputDir {
public:
    OutputDir() = default;
    explicit OutputDir(std::filesystem::path root);

    bool enabled() const { return root_.has_value(); }
    const std::optional<std::filesystem::path>& root() const { return root_; }

    void write_json(const std::string& name, const nlohmann::json& j);
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);
    /// Gnuplot script plotting columns `ycols` (1-based) of `csv` against column `xcol`.
    void write_gnuplot(const std::string& name, const std::string& csv, const std::string& title, int xcol,
                       const std::vector<int>& ycols, const std::vector<std::string>& header);
    void write_manifest(const std::string& command, const nlohmann::json& resolved_config, const std::string& status);

    const std::vector<std::pair<std::string, std::string>>& artifacts() const { return artifacts_; }

private:
    std::filesystem::path path(const std::string& name);
    std::optional<std::filesystem::path> root_;
    std::vector<std::pair<std::string, std::string>> artifacts_;  ///< (file, kind)
};

}  // namespace frontlab
