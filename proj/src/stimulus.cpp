// SPDX-License-Identifier: Apache-2.0

#include "wste/stimulus.hpp"

#include <cctype>
#include <sstream>

namespace wste {

namespace {

XValue parse_value(const std::string& tok, unsigned width, SrcLoc loc) {
  auto bad = [&](const std::string& why) -> XValue { throw ParseError(loc, "bad value '" + tok + "': " + why); };
  if (tok == "X" || tok == "x") return {BitVector::zeros(width), BitVector::ones(width)};
  BigUint val = 0, xm = 0;
  std::size_t bits = 0;
  if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'b' || tok[1] == 'B')) {
    for (char c : tok.substr(2)) {
      if (c == '_') continue;
      val <<= 1;
      xm <<= 1;
      if (c == '1') val |= 1;
      else if (c == 'x' || c == 'X') xm |= 1;
      else if (c != '0') return bad("not a binary digit");
      ++bits;
    }
  } else if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
    for (char c : tok.substr(2)) {
      if (c == '_') continue;
      if (!std::isxdigit(static_cast<unsigned char>(c))) return bad("not a hex digit");
      val = (val << 4) | BigUint(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : std::tolower(c) - 'a' + 10);
    }
  } else {
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return bad("expected a number or X");
      val = val * 10 + (c - '0');
    }
  }
  if (tok.empty()) return bad("empty");
  if (bits > width || (val >> width) != 0)
    return bad("does not fit in " + std::to_string(width) + " bits");
  return {BitVector(width, val), BitVector(width, xm)};
}

}  // namespace

std::vector<std::map<unsigned, XValue>> parse_stimulus(std::string_view text, const Module& m) {
  std::vector<std::map<unsigned, XValue>> frames;
  std::istringstream in{std::string(text)};
  std::string line;
  unsigned lineno = 0;
  auto inputs = m.inputs();
  while (std::getline(in, line)) {
    ++lineno;
    for (const char* c : {"//", "#"})
      if (auto pos = line.find(c); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string item;
    std::map<unsigned, XValue> frame;
    bool any = false;
    while (ls >> item) {
      any = true;
      SrcLoc loc{lineno, static_cast<unsigned>(line.find(item)) + 1};
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw ParseError(loc, "expected name=value, got '" + item + "'");
      std::string name = item.substr(0, eq);
      int w = m.find_word(name);
      if (w < 0) throw ParseError(loc, "unknown input '" + name + "'");
      if (m.words[w].kind != WordKind::Input) throw ParseError(loc, "'" + name + "' is not an input");
      if (frame.count(w)) throw ParseError(loc, "'" + name + "' assigned twice in one frame");
      frame.emplace(w, parse_value(item.substr(eq + 1), m.words[w].width, loc));
    }
    if (!any) continue;
    for (unsigned w : inputs)
      if (!frame.count(w))
        throw ParseError({lineno, 1}, "frame " + std::to_string(frames.size()) + " does not assign input '" +
                                          m.words[w].name + "'");
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace wste
