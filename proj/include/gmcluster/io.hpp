#pragma once
// File output and configuration plumbing. All numeric text is printed
// through one fixed "%.17g" formatter and map keys are emitted in sorted
// order, so identical inputs produce byte-identical result files; wall
// clock metadata goes to a separate file that results never include.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gmcluster {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// flat key = value configuration; '#' starts a comment
class FlatConfig {
public:
    FlatConfig() = default;

    static FlatConfig from_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        FlatConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected key = value");
            cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error("config key '" + key + "': not a number: " + it->second);
        }
    }

    int get_int(const std::string& key, int fallback) const
    {
        double v = get_double(key, double(fallback));
        int i = int(v);
        if (double(i) != v) throw config_error("config key '" + key + "': not an integer");
        return i;
    }

    std::vector<double> get_list(const std::string& key) const
    {
        std::vector<double> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.find_first_not_of(" \t") == std::string::npos) continue;
            out.push_back(std::stod(tok));
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

inline void ensure_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory: " + dir);
}

// resolved-config echo: every key the run actually used, defaults included
inline void write_resolved_config(const std::string& path,
                                  const std::map<std::string, std::string>& resolved)
{
    std::ofstream out(path);
    for (const auto& [k, v] : resolved) out << k << " = " << v << "\n";
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows)
{
    std::ofstream out(path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << fmt_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
}

inline void write_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

// flat binary field dump with a text sidecar describing the layout
inline void write_field_binary(const std::string& path, const std::vector<double>& field,
                               int n_rho, int n_theta, double time)
{
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(field.data()),
                  std::streamsize(field.size() * sizeof(double)));
    }
    std::ofstream hdr(path + ".hdr");
    hdr << "layout = row-major float64, index = i_rho * n_theta + j_theta\n";
    hdr << "n_rho = " << n_rho << "\n";
    hdr << "n_theta = " << n_theta << "\n";
    hdr << "rho_cells = centers (i + 0.5) / n_rho, rho in (0, 1)\n";
    hdr << "theta_cells = centers (j + 0.5) * 2 pi / n_theta\n";
    hdr << "time = " << fmt_double(time) << "\n";
}

}  // namespace gmcluster
