#include "forge/render.hpp"

#include <stdexcept>
#include <string>

namespace forge {

namespace {

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

const char kShadeMarks[4] = {'.', '#', '%', '@'};
const int kShadeGray[4] = {255, 180, 110, 230};

char hex_digit(int v) {
  if (v < 0 || v >= 16) {
    throw std::invalid_argument("render: digit out of range [0, 16)");
  }
  return "0123456789ABCDEF"[v];
}

void validate_grid(const RenderGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1) {
    throw std::invalid_argument("render: empty grid");
  }
  if (static_cast<long long>(grid.cells.size()) != grid.rows * grid.cols) {
    throw std::invalid_argument("render: cell count does not match shape");
  }
  if (!grid.row_labels.empty() &&
      static_cast<long long>(grid.row_labels.size()) != grid.rows) {
    throw std::invalid_argument("render: row label count mismatch");
  }
  for (const RenderCell& cell : grid.cells) {
    if (cell.level < 0 || cell.level > 3) {
      throw std::invalid_argument("render: shading level out of range");
    }
    hex_digit(cell.digit);
  }
}

// 3x5 glyphs for hexadecimal digits, one bit-packed row triple per line.
const unsigned char kGlyphs[16][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111},  // 0
    {0b010, 0b110, 0b010, 0b010, 0b111},  // 1
    {0b111, 0b001, 0b111, 0b100, 0b111},  // 2
    {0b111, 0b001, 0b111, 0b001, 0b111},  // 3
    {0b101, 0b101, 0b111, 0b001, 0b001},  // 4
    {0b111, 0b100, 0b111, 0b001, 0b111},  // 5
    {0b111, 0b100, 0b111, 0b101, 0b111},  // 6
    {0b111, 0b001, 0b001, 0b001, 0b001},  // 7
    {0b111, 0b101, 0b111, 0b101, 0b111},  // 8
    {0b111, 0b101, 0b111, 0b001, 0b111},  // 9
    {0b010, 0b101, 0b111, 0b101, 0b101},  // A
    {0b110, 0b101, 0b110, 0b101, 0b110},  // B
    {0b111, 0b100, 0b100, 0b100, 0b111},  // C
    {0b110, 0b101, 0b101, 0b101, 0b110},  // D
    {0b111, 0b100, 0b111, 0b100, 0b111},  // E
    {0b111, 0b100, 0b111, 0b100, 0b100},  // F
};

}  // namespace

RenderCell& RenderGrid::at(long long r, long long c) {
  if (r < 0 || r >= rows || c < 0 || c >= cols) {
    throw std::invalid_argument("render: cell index out of range");
  }
  return cells[static_cast<std::size_t>(r * cols + c)];
}

const RenderCell& RenderGrid::at(long long r, long long c) const {
  return const_cast<RenderGrid&>(*this).at(r, c);
}

std::string to_ascii(const RenderGrid& grid) {
  validate_grid(grid);
  std::size_t label_width = 0;
  for (const std::string& label : grid.row_labels) {
    label_width = std::max(label_width, label.size());
  }
  std::string out;
  for (long long r = 0; r < grid.rows; ++r) {
    if (!grid.row_labels.empty()) {
      const std::string& label = grid.row_labels[static_cast<std::size_t>(r)];
      out.append(label_width - label.size(), ' ');
      out += label;
      out += " | ";
    }
    for (long long c = 0; c < grid.cols; ++c) {
      if (c > 0) out += ' ';
      const RenderCell& cell = grid.at(r, c);
      out += kShadeMarks[cell.level];
      out += hex_digit(cell.digit);
    }
    out += '\n';
  }
  return out;
}

std::string to_pgm(const RenderGrid& grid, int scale) {
  validate_grid(grid);
  if (scale < 8) {
    throw std::invalid_argument("render: PGM scale must be at least 8");
  }
  // One pixel of grid line around and between cells.
  const long long pitch = scale + 1;
  const long long width = grid.cols * pitch + 1;
  const long long height = grid.rows * pitch + 1;
  std::vector<unsigned char> pix(static_cast<std::size_t>(width * height),
                                 96);
  const int glyph_scale = scale / 8;
  const long long glyph_w = 3LL * glyph_scale;
  const long long glyph_h = 5LL * glyph_scale;
  for (long long r = 0; r < grid.rows; ++r) {
    for (long long c = 0; c < grid.cols; ++c) {
      const RenderCell& cell = grid.at(r, c);
      const long long y0 = r * pitch + 1;
      const long long x0 = c * pitch + 1;
      const unsigned char bg =
          static_cast<unsigned char>(kShadeGray[cell.level]);
      for (long long y = 0; y < scale; ++y) {
        for (long long x = 0; x < scale; ++x) {
          pix[static_cast<std::size_t>((y0 + y) * width + x0 + x)] = bg;
        }
      }
      const unsigned char* glyph = kGlyphs[cell.digit];
      const long long gy0 = y0 + (scale - glyph_h) / 2;
      const long long gx0 = x0 + (scale - glyph_w) / 2;
      for (int gy = 0; gy < 5; ++gy) {
        for (int gx = 0; gx < 3; ++gx) {
          if (!(glyph[gy] >> (2 - gx) & 1)) continue;
          for (int sy = 0; sy < glyph_scale; ++sy) {
            for (int sx = 0; sx < glyph_scale; ++sx) {
              const long long y = gy0 + gy * glyph_scale + sy;
              const long long x = gx0 + gx * glyph_scale + sx;
              pix[static_cast<std::size_t>(y * width + x)] = 0;
            }
          }
        }
      }
    }
  }
  std::string out = "P2\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  for (long long y = 0; y < height; ++y) {
    for (long long x = 0; x < width; ++x) {
      if (x > 0) out += ' ';
      out += std::to_string(
          static_cast<int>(pix[static_cast<std::size_t>(y * width + x)]));
    }
    out += '\n';
  }
  return out;
}

RenderGrid render_fq_strip(long long q, long long n_lo, long long n_hi) {
  if (q < 2) throw std::invalid_argument("render: q must be at least 2");
  if (n_lo > n_hi) {
    throw std::invalid_argument("render: empty index range");
  }
  RenderGrid grid;
  grid.rows = 1;
  grid.cols = n_hi - n_lo + 1;
  for (long long n = n_lo; n <= n_hi; ++n) {
    RenderCell cell;
    cell.digit = static_cast<int>(f_q(q, n));
    if (n == 0) {
      cell.level = 3;
    } else {
      int depth = 0;
      long long v = n;
      while (v % q == 0 && depth < 2) {
        v /= q;
        ++depth;
      }
      cell.level = depth;
    }
    grid.cells.push_back(cell);
  }
  return grid;
}

RenderGrid render_sequence(const BoardParams& params,
                           const std::vector<int>& digits) {
  auto stats = analyze_sequence(params, digits);
  if (!stats) {
    throw std::invalid_argument(
        "render: sequence is not of the recognized class");
  }
  RenderGrid grid;
  grid.rows = 1;
  grid.cols = static_cast<long long>(digits.size());
  for (long long n = 1; n <= grid.cols; ++n) {
    RenderCell cell;
    cell.digit = digits[static_cast<std::size_t>(n - 1)];
    cell.level = (!stats->bad_coset.empty() &&
                  mod_pos(n - stats->bad_coset.residue,
                          stats->bad_coset.modulus) == 0)
                     ? 1
                     : 0;
    grid.cells.push_back(cell);
  }
  return grid;
}

RenderGrid render_window(const SudokuWindow& w) {
  validate_window(w);
  const long long q = w.params.q();
  const long long n_count = w.params.board_n();
  // Windows shorter than the good-columns requirement render unshaded.
  std::optional<std::vector<std::vector<int>>> sigmas;
  if (w.height() >= 2 * q) sigmas = has_good_columns(w);
  RenderGrid grid;
  grid.rows = w.height();
  grid.cols = n_count;
  for (long long m = w.m_hi; m >= w.m_lo; --m) {
    grid.row_labels.push_back("m=" + std::to_string(m));
    for (long long n = 1; n <= n_count; ++n) {
      RenderCell cell;
      cell.digit = w.at(n, m);
      if (sigmas) {
        const auto& sigma = (*sigmas)[static_cast<std::size_t>(n - 1)];
        cell.level =
            sigma[static_cast<std::size_t>(mod_pos(m, q))] == 0 ? 1 : 0;
      }
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

RenderGrid render_pseudo_affine(const PseudoAffine& psi, long long n_lo,
                                long long n_hi, long long m_lo,
                                long long m_hi) {
  if (n_lo > n_hi || m_lo > m_hi) {
    throw std::invalid_argument("render: empty index range");
  }
  RenderGrid grid;
  grid.rows = m_hi - m_lo + 1;
  grid.cols = n_hi - n_lo + 1;
  for (long long m = m_hi; m >= m_lo; --m) {
    grid.row_labels.push_back("m=" + std::to_string(m));
    for (long long n = n_lo; n <= n_hi; ++n) {
      RenderCell cell;
      cell.digit = static_cast<int>(psi.eval(n, m));
      cell.level = cell.digit == 0 ? 1 : 0;
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

}  // namespace forge
