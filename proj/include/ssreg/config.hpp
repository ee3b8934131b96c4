#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace ssreg {

//! Flattened view of a structured config file. A "[section]" header prefixes
//! every following key as "section.key"; '#' starts a comment; keys and
//! values are whitespace-trimmed. Nested dots inside keys pass through, so
//! "[prior]" + "slab.scale = 2" yields "prior.slab.scale".
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config(const std::string& path);

bool has_key(const ConfigMap& cfg, const std::string& key);

//! Typed lookups; missing keys yield the fallback, malformed values throw
//! ConfigError naming the key.
std::string get_string(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback);
double get_double(const ConfigMap& cfg, const std::string& key, double fallback);
int get_int(const ConfigMap& cfg, const std::string& key, int fallback);
std::uint64_t get_u64(const ConfigMap& cfg, const std::string& key, std::uint64_t fallback);
bool get_bool(const ConfigMap& cfg, const std::string& key, bool fallback);

//! Sub-map of the keys under "prefix." with that prefix stripped.
ConfigMap section_of(const ConfigMap& cfg, const std::string& prefix);

} // namespace ssreg
