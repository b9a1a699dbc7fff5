#pragma once

#include <string>

namespace crsegre {

// Three-valued answer; "inconclusive" always means "at the current truncation order".
enum class Verdict { yes, no, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

inline Verdict verdict_of(bool b) { return b ? Verdict::yes : Verdict::no; }

}  // namespace crsegre
