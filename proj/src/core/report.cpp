#include "hkt/report.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace hkt {

using ojson = nlohmann::ordered_json;

namespace {
const char* status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "indeterminate";
    }
}
} // namespace

int Report::n_fail() const {
    int n = 0;
    for (const auto& c : checks_)
        if (c.status == CheckStatus::Fail)
            ++n;
    return n;
}

int Report::n_indeterminate() const {
    int n = 0;
    for (const auto& c : checks_)
        if (c.status == CheckStatus::Indeterminate)
            ++n;
    return n;
}

int Report::exit_code() const {
    if (n_fail() > 0)
        return 1;
    if (n_indeterminate() > 0)
        return 2;
    return 0;
}

std::string Report::to_json(bool with_timing) const {
    ojson j;
    j["format"] = "hkt-report";
    j["version"] = 1;
    j["command"] = command_;
    if (!config_json_.empty())
        j["config"] = ojson::parse(config_json_);
    ojson cs = ojson::array();
    for (const auto& c : checks_) {
        ojson e;
        e["id"] = c.id;
        e["status"] = status_name(c.status);
        e["residual"] = c.residual;
        e["tolerance"] = c.tolerance;
        if (!c.detail.empty())
            e["detail"] = c.detail;
        cs.push_back(e);
    }
    j["checks"] = cs;
    j["summary"]["total"] = checks_.size();
    j["summary"]["fail"] = n_fail();
    j["summary"]["indeterminate"] = n_indeterminate();
    if (!artifacts_.empty()) {
        ojson a = ojson::object();
        for (const auto& [name, path] : artifacts_)
            a[name] = path;
        j["artifacts"] = a;
    }
    if (with_timing) {
        ojson t;
        t["total_seconds"] = total_seconds_;
        ojson per = ojson::array();
        for (const auto& c : checks_)
            per.push_back(c.seconds);
        t["per_check_seconds"] = per;
        j["timing"] = t;
    }
    return j.dump(1);
}

void Report::write(const std::string& path, bool with_timing) const {
    std::ofstream f(path);
    f << to_json(with_timing) << "\n";
}

std::string Report::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks_) {
        const char* tag = c.status == CheckStatus::Pass ? "[PASS]"
                          : c.status == CheckStatus::Fail ? "[FAIL]"
                                                          : "[INDET]";
        os << tag << " " << c.id << "  residual=" << c.residual << "  tol=" << c.tolerance;
        if (!c.detail.empty())
            os << "  (" << c.detail << ")";
        os << "\n";
    }
    return os.str();
}

} // namespace hkt
