#include "nslbp/isa.hpp"

#include <sstream>

#include "nslbp/bitrow.hpp"
#include "nslbp/errors.hpp"

namespace nslbp {

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;
};

[[noreturn]] void syntax_error(const Cursor& c, const std::string& msg) {
  std::ostringstream os;
  os << "line " << c.line << ", col " << c.col << ": " << msg;
  fail(Err::SyntaxError, os.str());
}

int operand_count(Opcode op) {
  switch (op) {
    case Opcode::Copy: return 2;  // dest, src
    case Opcode::Ini: return 2;   // dest, constant
    case Opcode::Search: return 3;
    case Opcode::Cmp: return 4;
    default: return 4;  // dest + three sources
  }
}

}  // namespace

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Copy: return "copy";
    case Opcode::Ini: return "ini";
    case Opcode::Cmp: return "cmp";
    case Opcode::Search: return "search";
    case Opcode::Nand3: return "nand3";
    case Opcode::Nor3: return "nor3";
    case Opcode::Carry: return "carry";
    case Opcode::Sum: return "sum";
  }
  return "?";
}

void Instruction::validate() const {
  if (size != 64 && size != 128 && size != 256)
    fail(Err::InvalidArgument, "size must be 64, 128 or 256");
  auto check = [](int addr, const char* what) {
    if (addr < 0 || addr >= 256) fail(Err::BadAddress, std::string(what) + " out of range");
  };
  check(dest, "dest");
  switch (op) {
    case Opcode::Ini: break;
    case Opcode::Copy: check(src1, "src1"); break;
    case Opcode::Search:
      check(src1, "src1");
      check(src2, "src2");
      break;
    case Opcode::Cmp:
    case Opcode::Nand3:
    case Opcode::Nor3:
    case Opcode::Carry:
    case Opcode::Sum:
      check(src1, "src1");
      check(src2, "src2");
      check(src3, "src3");
      break;
  }
}

Program parse_program(const std::string& text) {
  Program program;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    // Strip comment.
    size_t semi = line.find(';');
    if (semi != std::string::npos) line.resize(semi);

    std::vector<std::string> tokens;
    std::string tok;
    for (size_t i = 0; i <= line.size(); ++i) {
      char ch = i < line.size() ? line[i] : ' ';
      if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
        if (!tok.empty()) {
          tokens.push_back(tok);
          tok.clear();
        }
      } else {
        tok.push_back(ch);
      }
    }
    if (tokens.empty()) continue;

    Cursor cur{text, 0, line_no, 1};
    const std::string& mnemonic = tokens[0];
    Instruction instr;
    if (mnemonic == "copy") instr.op = Opcode::Copy;
    else if (mnemonic == "ini") instr.op = Opcode::Ini;
    else if (mnemonic == "cmp") instr.op = Opcode::Cmp;
    else if (mnemonic == "search") instr.op = Opcode::Search;
    else if (mnemonic == "nand3") instr.op = Opcode::Nand3;
    else if (mnemonic == "nor3") instr.op = Opcode::Nor3;
    else if (mnemonic == "carry") instr.op = Opcode::Carry;
    else if (mnemonic == "sum") instr.op = Opcode::Sum;
    else fail(Err::UnknownOpcode, "line " + std::to_string(line_no) + ": '" + mnemonic + "'");

    // Optional trailing size token.
    std::vector<std::string> ops(tokens.begin() + 1, tokens.end());
    if (!ops.empty() && ops.back().size() > 1 && ops.back()[0] == '#') {
      const std::string& sz = ops.back();
      if (sz == "#64") instr.size = 64;
      else if (sz == "#128") instr.size = 128;
      else if (sz == "#256") instr.size = 256;
      else syntax_error(cur, "size must be #64, #128 or #256");
      ops.pop_back();
    }

    if (static_cast<int>(ops.size()) != operand_count(instr.op))
      syntax_error(cur, std::string("'") + opcode_name(instr.op) + "' expects " +
                            std::to_string(operand_count(instr.op)) + " operands");

    auto parse_reg = [&](const std::string& t) -> int {
      if (t.size() < 2 || t[0] != 'r') syntax_error(cur, "expected register, got '" + t + "'");
      int value = 0;
      for (size_t i = 1; i < t.size(); ++i) {
        if (t[i] < '0' || t[i] > '9') syntax_error(cur, "expected register, got '" + t + "'");
        value = value * 10 + (t[i] - '0');
        if (value > 9999) break;
      }
      if (value >= 256)
        fail(Err::BadAddress, "line " + std::to_string(line_no) + ": register " + t);
      return value;
    };

    instr.dest = parse_reg(ops[0]);
    if (instr.op == Opcode::Ini) {
      if (ops[1] == "zero") instr.ini_ones = false;
      else if (ops[1] == "one") instr.ini_ones = true;
      else syntax_error(cur, "ini constant must be 'zero' or 'one'");
    } else {
      instr.src1 = parse_reg(ops[1]);
      if (ops.size() > 2) instr.src2 = parse_reg(ops[2]);
      if (ops.size() > 3) instr.src3 = parse_reg(ops[3]);
    }
    instr.validate();
    program.instructions.push_back(instr);
  }
  return program;
}

std::string format_instruction(const Instruction& instr) {
  std::ostringstream os;
  os << opcode_name(instr.op) << " r" << instr.dest;
  switch (instr.op) {
    case Opcode::Ini: os << ", " << (instr.ini_ones ? "one" : "zero"); break;
    case Opcode::Copy: os << ", r" << instr.src1; break;
    case Opcode::Search: os << ", r" << instr.src1 << ", r" << instr.src2; break;
    default:
      os << ", r" << instr.src1 << ", r" << instr.src2 << ", r" << instr.src3;
      break;
  }
  os << " #" << instr.size;
  return os.str();
}

std::string format_program(const Program& program) {
  std::string out;
  for (const Instruction& instr : program.instructions) {
    out += format_instruction(instr);
    out += "\n";
  }
  return out;
}

}  // namespace nslbp
