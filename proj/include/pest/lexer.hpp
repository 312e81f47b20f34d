#pragma once

#include "pest/ast.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace pest {

enum class Tok {
    Ident, IntLit,
    // keywords
    KwLocal, KwIf, KwThen, KwElse, KwFi, KwWhile, KwDo, KwOd, KwCall,
    KwFor, KwFrom, KwTo, KwMap, KwIn, KwUpdate, KwOn, KwWith, KwSkip,
    KwTrue, KwFalse, KwExists,            // `exists` only valid in internal syntax
    ForallDash, ExistsDash,               // `forall-` / `exists-`
    AtPre,                                // `@pre`
    // punctuation
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Colon, Slash2Dots,             // `..`
    Bar,                                  // `|`
    // operators
    Arrow,                                // `<-`
    Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, Eq, Ne,
    AndAnd, OrOr, Imp, Bang,
    // annotation markers
    AnnPre, AnnPost, AnnInv, AnnVar,      // :?  :!  :?!  :#
    End,
};

inline const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::KwLocal: return "'local'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwFi: return "'fi'";
        case Tok::KwWhile: return "'while'";
        case Tok::KwDo: return "'do'";
        case Tok::KwOd: return "'od'";
        case Tok::KwCall: return "'call'";
        case Tok::KwFor: return "'for'";
        case Tok::KwFrom: return "'from'";
        case Tok::KwTo: return "'to'";
        case Tok::KwMap: return "'map'";
        case Tok::KwIn: return "'in'";
        case Tok::KwUpdate: return "'update'";
        case Tok::KwOn: return "'on'";
        case Tok::KwWith: return "'with'";
        case Tok::KwSkip: return "'skip'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwExists: return "'exists'";
        case Tok::ForallDash: return "'forall-'";
        case Tok::ExistsDash: return "'exists-'";
        case Tok::AtPre: return "'@pre'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Slash2Dots: return "'..'";
        case Tok::Bar: return "'|'";
        case Tok::Arrow: return "'<-'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::Eq: return "'='";
        case Tok::Ne: return "'/='";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Imp: return "'=>'";
        case Tok::Bang: return "'!'";
        case Tok::AnnPre: return "':?'";
        case Tok::AnnPost: return "':!'";
        case Tok::AnnInv: return "':?!'";
        case Tok::AnnVar: return "':#'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;
    Span span;
};

// Parse (and lex) failure; carries the offending location and, when produced
// by the parser, the set of tokens that would have been accepted.
class ParseError : public std::runtime_error {
public:
    ParseError(Span sp, std::string msg, std::vector<std::string> expected = {})
        : std::runtime_error(format(sp, msg, expected)),
          span(sp),
          message(std::move(msg)),
          expected_tokens(std::move(expected)) {}

    Span span;
    std::string message;
    std::vector<std::string> expected_tokens;

private:
    static std::string format(Span sp, const std::string& msg,
                              const std::vector<std::string>& expected) {
        std::string out = sp.str() + ": " + msg;
        if (!expected.empty()) {
            out += " (expected ";
            for (size_t i = 0; i < expected.size(); ++i) {
                if (i) out += expected.size() == 2 ? " or " : ", ";
                out += expected[i];
            }
            out += ")";
        }
        return out;
    }
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws_and_comments();
            if (eof()) {
                out.push_back({Tok::End, "", here(0)});
                return out;
            }
            out.push_back(next_token());
        }
    }

private:
    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    bool eof() const { return pos_ >= src_.size(); }
    char peek(size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    Span here(int len) const { return Span{line_, col_, line_, col_ + len}; }

    void skip_ws_and_comments() {
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
                continue;
            }
            return;
        }
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_cont(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    Token make(Tok k, int len) {
        Span sp = here(len);
        std::string text(src_.substr(pos_, len));
        for (int i = 0; i < len; ++i) advance();
        return {k, text, sp};
    }

    Token next_token() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t n = 0;
            while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
            return make(Tok::IntLit, static_cast<int>(n));
        }
        if (ident_start(c)) {
            size_t n = 0;
            while (ident_cont(peek(n))) ++n;
            std::string word(src_.substr(pos_, n));
            if ((word == "forall" || word == "exists") && peek(n) == '-') {
                Tok k = word == "forall" ? Tok::ForallDash : Tok::ExistsDash;
                return make(k, static_cast<int>(n) + 1);
            }
            Tok k = keyword(word);
            return make(k, static_cast<int>(n));
        }
        switch (c) {
            case '(': return make(Tok::LParen, 1);
            case ')': return make(Tok::RParen, 1);
            case '{': return make(Tok::LBrace, 1);
            case '}': return make(Tok::RBrace, 1);
            case '[': return make(Tok::LBracket, 1);
            case ']': return make(Tok::RBracket, 1);
            case ',': return make(Tok::Comma, 1);
            case '+': return make(Tok::Plus, 1);
            case '-': return make(Tok::Minus, 1);
            case '*': return make(Tok::Star, 1);
            case '%': return make(Tok::Percent, 1);
            case '!': return make(Tok::Bang, 1);
            case '.':
                if (peek(1) == '.') return make(Tok::Slash2Dots, 2);
                break;
            case '|':
                if (peek(1) == '|') return make(Tok::OrOr, 2);
                return make(Tok::Bar, 1);
            case '&':
                if (peek(1) == '&') return make(Tok::AndAnd, 2);
                break;
            case '/':
                if (peek(1) == '=') return make(Tok::Ne, 2);
                return make(Tok::Slash, 1);
            case '<':
                if (peek(1) == '-') return make(Tok::Arrow, 2);
                if (peek(1) == '=') return make(Tok::Le, 2);
                return make(Tok::Lt, 1);
            case '>':
                if (peek(1) == '=') return make(Tok::Ge, 2);
                return make(Tok::Gt, 1);
            case '=':
                if (peek(1) == '>') return make(Tok::Imp, 2);
                return make(Tok::Eq, 1);
            case ':':
                if (peek(1) == '?' && peek(2) == '!') return make(Tok::AnnInv, 3);
                if (peek(1) == '?') return make(Tok::AnnPre, 2);
                if (peek(1) == '!') return make(Tok::AnnPost, 2);
                if (peek(1) == '#') return make(Tok::AnnVar, 2);
                return make(Tok::Colon, 1);
            case '@': {
                if (src_.substr(pos_, 4) == "@pre") return make(Tok::AtPre, 4);
                break;
            }
            default: break;
        }
        throw ParseError(here(1), std::string("unexpected character '") + c + "'");
    }

    static Tok keyword(const std::string& w) {
        if (w == "local") return Tok::KwLocal;
        if (w == "if") return Tok::KwIf;
        if (w == "then") return Tok::KwThen;
        if (w == "else") return Tok::KwElse;
        if (w == "fi") return Tok::KwFi;
        if (w == "while") return Tok::KwWhile;
        if (w == "do") return Tok::KwDo;
        if (w == "od") return Tok::KwOd;
        if (w == "call") return Tok::KwCall;
        if (w == "for") return Tok::KwFor;
        if (w == "from") return Tok::KwFrom;
        if (w == "to") return Tok::KwTo;
        if (w == "map") return Tok::KwMap;
        if (w == "in") return Tok::KwIn;
        if (w == "update") return Tok::KwUpdate;
        if (w == "on") return Tok::KwOn;
        if (w == "with") return Tok::KwWith;
        if (w == "skip") return Tok::KwSkip;
        if (w == "true") return Tok::KwTrue;
        if (w == "false") return Tok::KwFalse;
        if (w == "exists") return Tok::KwExists;
        return Tok::Ident;
    }
};

}  // namespace pest
