#pragma once

#include <string>
#include <vector>

#include "hkt/config.hpp"

namespace hkt {

enum class CheckStatus { Pass, Fail, Indeterminate };

struct CheckRecord {
    std::string id;          // stable machine-readable check identifier
    CheckStatus status = CheckStatus::Pass;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;      // worst point / extra numbers, human-readable
    double seconds = 0.0;
};

// Machine-readable command report. JSON layout is stable and documented in
// schemas/report.schema.json; two runs with the same config and seed produce
// byte-identical output except for the "timing" object.
class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void add(CheckRecord rec) { checks_.push_back(std::move(rec)); }
    CheckRecord& back() { return checks_.back(); }
    const std::vector<CheckRecord>& checks() const { return checks_; }
    const std::string& command() const { return command_; }

    void set_config_json(std::string j) { config_json_ = std::move(j); }
    void set_total_seconds(double s) { total_seconds_ = s; }
    void add_artifact(const std::string& name, const std::string& path) {
        artifacts_.emplace_back(name, path);
    }

    int n_fail() const;
    int n_indeterminate() const;
    // 0 pass, 1 fail, 2 indeterminate
    int exit_code() const;

    std::string to_json(bool with_timing = true) const;
    void write(const std::string& path, bool with_timing = true) const;
    // one line per check, e.g. for terminals: "[PASS] deform.eq41 residual=..."
    std::string to_text() const;

private:
    std::string command_;
    std::string config_json_;
    std::vector<CheckRecord> checks_;
    std::vector<std::pair<std::string, std::string>> artifacts_;
    double total_seconds_ = 0.0;
};

} // namespace hkt
