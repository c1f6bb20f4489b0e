#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mibie/harness.hpp"

namespace mibie::config {

// Flat key = value text, '#' starts a comment.
class KeyValues {
public:
    static KeyValues parse(std::istream& in);
    static KeyValues load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Recognised keys, in documentation order.
const std::vector<std::string>& known_keys();

// Overrides fields of base; unknown keys and malformed values raise ArgumentError.
harness::ExperimentConfig apply(const KeyValues& kv, harness::ExperimentConfig base = {});

// Every key with its current value; apply(to_key_values(c)) reproduces c.
KeyValues to_key_values(const harness::ExperimentConfig& cfg);

}  // namespace mibie::config
