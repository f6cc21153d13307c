#pragma once

// Machine-readable run reports.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace tropmirror {

inline constexpr const char *report_schema = "tropmirror.report/1";

enum class Status { Pass, Fail, Skip };

inline std::string to_string(Status s)
{
    switch (s) {
    case Status::Pass:
        return "pass";
    case Status::Fail:
        return "fail";
    case Status::Skip:
        return "skip";
    }
    return "?";
}

struct ReportCheck {
    std::string name;
    Status status = Status::Pass;
    nlohmann::json witness; // null when there is nothing to show
};

class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    nlohmann::json config = nlohmann::json::object();
    nlohmann::json data = nlohmann::json::object();

    void check(std::string name, bool pass, nlohmann::json witness = nullptr)
    {
        if (!pass && witness.is_null())
            witness = "failed";
        checks_.push_back({std::move(name), pass ? Status::Pass : Status::Fail, std::move(witness)});
    }
    void skip(std::string name, std::string why) { checks_.push_back({std::move(name), Status::Skip, why}); }
    void note(std::string text) { notes_.push_back(std::move(text)); }

    const std::vector<ReportCheck> &checks() const { return checks_; }
    const std::string &command() const { return command_; }

    std::size_t count(Status s) const
    {
        std::size_t n = 0;
        for (const auto &c : checks_)
            n += c.status == s;
        return n;
    }
    bool ok() const { return count(Status::Fail) == 0; }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["schema"] = report_schema;
        j["command"] = command_;
        j["config"] = config;
        j["checks"] = nlohmann::json::array();
        for (const auto &c : checks_) {
            nlohmann::json e{{"name", c.name}, {"status", to_string(c.status)}};
            if (!c.witness.is_null())
                e["witness"] = c.witness;
            j["checks"].push_back(e);
        }
        j["summary"] = {{"pass", count(Status::Pass)}, {"fail", count(Status::Fail)}, {"skip", count(Status::Skip)}};
        if (!data.empty())
            j["data"] = data;
        if (!notes_.empty())
            j["notes"] = notes_;
        return j;
    }

    void print(std::ostream &os) const
    {
        for (const auto &c : checks_) {
            os << "[" << to_string(c.status) << "] " << c.name;
            if (c.status != Status::Pass && !c.witness.is_null())
                os << "  " << (c.witness.is_string() ? c.witness.get<std::string>() : c.witness.dump());
            os << "\n";
        }
        for (const auto &n : notes_)
            os << "note: " << n << "\n";
        os << command_ << ": " << count(Status::Pass) << " pass, " << count(Status::Fail) << " fail, "
           << count(Status::Skip) << " skip\n";
    }

private:
    std::string command_;
    std::vector<ReportCheck> checks_;
    std::vector<std::string> notes_;
};

/// Throws if j is not shaped like a report.
inline void validate_report_json(const nlohmann::json &j)
{
    auto need = [](bool ok, const char *what) {
        if (!ok)
            throw std::invalid_argument(std::string("report schema: ") + what);
    };
    need(j.is_object(), "not an object");
    need(j.value("schema", "") == report_schema, "schema tag");
    need(j.contains("command") && j["command"].is_string(), "command");
    need(j.contains("config") && j["config"].is_object(), "config");
    need(j.contains("checks") && j["checks"].is_array(), "checks");
    std::size_t p = 0, f = 0, s = 0;
    for (const auto &c : j["checks"]) {
        need(c.contains("name") && c["name"].is_string(), "check name");
        const auto st = c.value("status", "");
        need(st == "pass" || st == "fail" || st == "skip", "check status");
        p += st == "pass";
        f += st == "fail";
        s += st == "skip";
        if (st == "fail")
            need(c.contains("witness"), "failing check without witness");
    }
    need(j.contains("summary") && j["summary"].value("pass", -1) == static_cast<long>(p) &&
             j["summary"].value("fail", -1) == static_cast<long>(f) &&
             j["summary"].value("skip", -1) == static_cast<long>(s),
         "summary counts");
}

} // namespace tropmirror
