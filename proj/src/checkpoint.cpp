#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "casbox/rulesearch.hpp"

namespace casbox::search {

namespace {

constexpr std::string_view kMagic = "# casbox search checkpoint v1";

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::uint64_t parse_u64(std::string_view s, int base, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw CheckpointError("malformed " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

// Splits "key: value"; returns false if the line is not of that shape.
bool split_field(std::string_view line, std::string_view& key, std::string_view& value) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  key = trim(line.substr(0, colon));
  value = trim(line.substr(colon + 1));
  return true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("missing checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw CheckpointError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void SearchCheckpoint::validate() const {
  if (shard) shard->validate();
  if (implicit) {
    if (stage != Stage::balanced) throw CheckpointError("only the balanced stage may be implicit");
    if (!rules.empty()) throw CheckpointError("implicit checkpoint must not list rules");
    return;
  }
  if (count != rules.size()) throw CheckpointError("checkpoint count does not match its rule list");
  for (std::size_t i = 1; i < rules.size(); ++i)
    if (rules[i - 1] >= rules[i]) throw CheckpointError("checkpoint rules are not strictly increasing");
  if (shard)
    for (auto r : rules)
      if (!shard->contains(r)) throw CheckpointError("checkpoint rule outside its shard");
}

std::uint32_t checkpoint_checksum(std::string_view serialized) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(serialized.data()), static_cast<uInt>(serialized.size())));
}

std::string serialize_checkpoint(const SearchCheckpoint& cp) {
  cp.validate();
  std::string out;
  out.reserve(64 + cp.rules.size() * 11);
  out += kMagic;
  out += "\nstage: ";
  out += stage_name(cp.stage);
  out += "\ncount: " + std::to_string(cp.count);
  out += "\ninput-checksum: " + hex32(cp.input_checksum);
  if (cp.shard) out += "\nshard: " + std::to_string(cp.shard->index) + "/" + std::to_string(cp.shard->count);
  out += cp.implicit ? "\nrules: implicit\n" : "\nrules: listed\n";
  char buf[16];
  for (auto r : cp.rules) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r);
    out.append(buf, ptr);
    out += '\n';
  }
  out += "checksum: " + hex32(checkpoint_checksum(out)) + "\n";
  return out;
}

SearchCheckpoint parse_checkpoint(std::string_view text) {
  const auto tail = text.rfind("checksum: ");
  if (tail == std::string_view::npos || (tail != 0 && text[tail - 1] != '\n'))
    throw CheckpointError("checkpoint has no trailing checksum line");
  const auto stored = static_cast<std::uint32_t>(
      parse_u64(trim(text.substr(tail + 10, text.find('\n', tail) - tail - 10)), 16, "checksum"));
  const std::string_view body = text.substr(0, tail);
  if (checkpoint_checksum(body) != stored) throw CheckpointError("checkpoint checksum mismatch");

  SearchCheckpoint cp;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= body.size()) return false;
    auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    line = body.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || trim(line) != kMagic) throw CheckpointError("not a casbox checkpoint");
  bool have_stage = false, have_count = false, have_rules = false;
  while (!have_rules && next_line(line)) {
    std::string_view key, value;
    if (!split_field(line, key, value)) throw CheckpointError("malformed checkpoint header");
    if (key == "stage") {
      try {
        cp.stage = parse_stage(value);
      } catch (const std::invalid_argument& e) {
        throw CheckpointError(e.what());
      }
      have_stage = true;
    } else if (key == "count") {
      cp.count = parse_u64(value, 10, "count");
      have_count = true;
    } else if (key == "input-checksum") {
      cp.input_checksum = static_cast<std::uint32_t>(parse_u64(value, 16, "input checksum"));
    } else if (key == "shard") {
      const auto slash = value.find('/');
      if (slash == std::string_view::npos) throw CheckpointError("malformed shard field");
      Shard s;
      s.index = static_cast<std::uint32_t>(parse_u64(value.substr(0, slash), 10, "shard index"));
      s.count = static_cast<std::uint32_t>(parse_u64(value.substr(slash + 1), 10, "shard count"));
      cp.shard = s;
    } else if (key == "rules") {
      if (value != "implicit" && value != "listed") throw CheckpointError("malformed rules field");
      cp.implicit = value == "implicit";
      have_rules = true;
    } else {
      throw CheckpointError("unknown checkpoint field '" + std::string(key) + "'");
    }
  }
  if (!have_stage || !have_count || !have_rules) throw CheckpointError("incomplete checkpoint header");
  while (next_line(line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto v = parse_u64(line, 10, "rule number");
    if (v > 0xFFFFFFFFull) throw CheckpointError("rule number out of range");
    cp.rules.push_back(static_cast<std::uint32_t>(v));
  }
  cp.validate();
  cp.file_checksum = stored;
  return cp;
}

std::uint32_t write_checkpoint(const std::filesystem::path& path, const SearchCheckpoint& cp) {
  const std::string text = serialize_checkpoint(cp);
  atomic_write(path, text);
  return checkpoint_checksum(std::string_view(text).substr(0, text.rfind("checksum: ")));
}

std::uint32_t write_balanced_listed(const std::filesystem::path& path, const Shard& shard,
                                    std::uint32_t input_checksum) {
  shard.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + tmp.string());

  uLong crc = crc32(0L, Z_NULL, 0);
  std::string buffer;
  auto flush = [&] {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buffer.data()), static_cast<uInt>(buffer.size()));
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    buffer.clear();
  };
  buffer += kMagic;
  buffer += "\nstage: balanced\ncount: " + std::to_string(count_balanced(shard.begin(), shard.end()));
  buffer += "\ninput-checksum: " + hex32(input_checksum);
  if (shard.count > 1) buffer += "\nshard: " + std::to_string(shard.index) + "/" + std::to_string(shard.count);
  buffer += "\nrules: listed\n";
  BalancedEnumerator it(shard.begin(), shard.end());
  char buf[16];
  while (auto r = it.next()) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *r);
    buffer.append(buf, ptr);
    buffer += '\n';
    if (buffer.size() > (1u << 20)) flush();
  }
  flush();
  const auto checksum = static_cast<std::uint32_t>(crc);
  buffer = "checksum: " + hex32(checksum) + "\n";
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out.close();
  if (!out) throw CheckpointError("short write to " + tmp.string());
  std::filesystem::rename(tmp, path);
  return checksum;
}

SearchCheckpoint read_checkpoint(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_checkpoint(text);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Stage stage,
                                      const std::optional<Shard>& shard) {
  std::string name(stage_name(stage));
  if (shard && shard->count > 1)
    name += ".shard-" + std::to_string(shard->index) + "-of-" + std::to_string(shard->count);
  return dir / (name + ".ckpt");
}

SearchCheckpoint merge_shards(const std::filesystem::path& dir, Stage stage, std::uint32_t shards) {
  if (shards == 0) throw std::invalid_argument("shard count must be positive");
  SearchCheckpoint merged;
  merged.stage = stage;
  std::string checksums;
  for (std::uint32_t i = 0; i < shards; ++i) {
    const Shard s{shards, i};
    const auto part = read_checkpoint(checkpoint_path(dir, stage, shards > 1 ? std::optional(s) : std::nullopt));
    if (part.stage != stage) throw CheckpointError("shard checkpoint has the wrong stage");
    if (shards > 1 && (!part.shard || part.shard->count != shards || part.shard->index != i))
      throw CheckpointError("shard checkpoint does not match its file name");
    if (i == 0)
      merged.implicit = part.implicit;
    else if (merged.implicit != part.implicit)
      throw CheckpointError("cannot merge implicit and listed shards");
    merged.count += part.count;
    merged.rules.insert(merged.rules.end(), part.rules.begin(), part.rules.end());
    checksums += hex32(part.input_checksum);
  }
  merged.input_checksum = checkpoint_checksum(checksums);
  write_checkpoint(checkpoint_path(dir, stage), merged);
  return merged;
}

}  // namespace casbox::search
