#pragma once

#include <string>
#include <vector>

namespace arrkit {

// Pass/fail report for the verification operations. Failures carry a short
// description of the first offending identity.
struct CheckReport {
    struct Item {
        std::string name;
        bool pass = false;
        std::string detail;
    };
    std::vector<Item> items;

    void add(const std::string& name, bool pass, const std::string& detail = "")
    {
        items.push_back({name, pass, detail});
    }
    bool all_pass() const
    {
        for (const auto& it : items)
            if (!it.pass)
                return false;
        return true;
    }
    std::string to_text() const
    {
        std::string out;
        for (const auto& it : items) {
            out += (it.pass ? "PASS" : "FAIL");
            out += "  " + it.name;
            if (!it.detail.empty())
                out += "  (" + it.detail + ")";
            out += "\n";
        }
        return out;
    }
};

} // namespace arrkit
