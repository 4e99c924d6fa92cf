//! Double Metaphone encoder (Lawrence Philips' rule set).
//!
//! Produces a primary code and, when the rules diverge, an alternate code.
//! Hand-ported rather than pulled in as a dependency: published ports
//! disagree on edge cases, and the conformance fixture in tests/fixtures
//! pins the behavior this crate guarantees.

use crate::probe;

pub const DEFAULT_MAX_CODE_LEN: usize = 4;

/// Result of encoding one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneticCodes {
    primary: String,
    alternate: Option<String>,
}

impl PhoneticCodes {
    /// Primary code. Empty when the input contains no encodable letters.
    pub fn primary(&self) -> &str {
        &self.primary
    }

    /// Alternate code, present only when it differs from the primary.
    pub fn alternate(&self) -> Option<&str> {
        self.alternate.as_deref()
    }

    /// The distinct non-empty codes, primary first.
    pub fn codes(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary.as_str())
            .chain(self.alternate.as_deref())
            .filter(|c| !c.is_empty())
    }
}

/// Encodes `word`, truncating both codes to `max_code_len` symbols.
/// Case-insensitive; characters with no rule (digits, punctuation) are
/// skipped. `max_code_len` must be at least 1.
pub fn encode(word: &str, max_code_len: usize) -> PhoneticCodes {
    assert!(max_code_len >= 1, "max_code_len must be at least 1");
    probe::count_phonetic_encode();

    let mut enc = Encoder::new(word);
    enc.run();

    // Codes are append-only, so truncating the full encoding is equivalent
    // to stopping once both codes reach the cap.
    let cut = |code: &str| -> String {
        let s: String = code.chars().take(max_code_len).collect();
        s.trim_end_matches(' ').to_owned()
    };
    let primary = cut(&enc.primary);
    let secondary = cut(&enc.secondary);
    let alternate = if secondary != primary {
        Some(secondary)
    } else {
        None
    };
    PhoneticCodes { primary, alternate }
}

struct Encoder {
    chars: Vec<char>,
    len: isize,
    last: isize,
    slavo_germanic: bool,
    primary: String,
    secondary: String,
}

impl Encoder {
    fn new(word: &str) -> Encoder {
        let chars: Vec<char> = word.chars().flat_map(char::to_uppercase).collect();
        let len = chars.len() as isize;
        let upper: String = chars.iter().collect();
        let slavo_germanic = upper.contains('W')
            || upper.contains('K')
            || upper.contains("CZ")
            || upper.contains("WITZ");
        Encoder {
            chars,
            len,
            last: len - 1,
            slavo_germanic,
            primary: String::new(),
            secondary: String::new(),
        }
    }

    /// Character at `i`; a space beyond either end, which the rules rely on
    /// for word-boundary patterns like `["T", "S", " "]`.
    fn at(&self, i: isize) -> char {
        if i < 0 || i >= self.len {
            ' '
        } else {
            self.chars[i as usize]
        }
    }

    /// True when the `length` characters starting at `start` match any
    /// entry in `set`.
    fn string_at(&self, start: isize, length: usize, set: &[&str]) -> bool {
        if start < 0 {
            return false;
        }
        set.iter().any(|pat| {
            debug_assert_eq!(pat.len(), length);
            pat.chars()
                .enumerate()
                .all(|(k, pc)| self.at(start + k as isize) == pc)
        })
    }

    fn is_vowel(&self, i: isize) -> bool {
        matches!(self.at(i), 'A' | 'E' | 'I' | 'O' | 'U' | 'Y')
    }

    fn add(&mut self, both: &str) {
        self.primary.push_str(both);
        self.secondary.push_str(both);
    }

    fn add2(&mut self, primary: &str, secondary: &str) {
        self.primary.push_str(primary);
        self.secondary.push_str(secondary);
    }

    fn run(&mut self) {
        let mut current: isize = 0;

        // Silent first letter, e.g. 'gnome', 'knight', 'pneumonia', 'wrack',
        // 'psych'.
        if self.string_at(0, 2, &["GN", "KN", "PN", "WR", "PS"]) {
            current += 1;
        }

        // Initial 'X' is pronounced 'Z', which maps to 'S', e.g. 'Xavier'.
        if self.at(0) == 'X' {
            self.add("S");
            current += 1;
        }

        while current < self.len {
            current = self.step(current);
        }
    }

    /// Applies the rule for the character at `current`; returns the next
    /// position.
    fn step(&mut self, current: isize) -> isize {
        match self.at(current) {
            'A' | 'E' | 'I' | 'O' | 'U' | 'Y' => {
                // Vowels are encoded only in initial position.
                if current == 0 {
                    self.add("A");
                }
                current + 1
            }

            'B' => {
                // '-mb' as in 'dumb' is handled under 'M'.
                self.add("P");
                if self.at(current + 1) == 'B' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'Ç' => {
                self.add("S");
                current + 1
            }

            'C' => self.step_c(current),

            'D' => {
                if self.string_at(current, 2, &["DG"]) {
                    if self.string_at(current + 2, 1, &["I", "E", "Y"]) {
                        // 'edge'
                        self.add("J");
                        current + 3
                    } else {
                        // 'edgar'
                        self.add("TK");
                        current + 2
                    }
                } else if self.string_at(current, 2, &["DT", "DD"]) {
                    self.add("T");
                    current + 2
                } else {
                    self.add("T");
                    current + 1
                }
            }

            'F' => {
                self.add("F");
                if self.at(current + 1) == 'F' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'G' => self.step_g(current),

            'H' => {
                // Kept only when initial before a vowel or between vowels.
                if (current == 0 || self.is_vowel(current - 1)) && self.is_vowel(current + 1) {
                    self.add("H");
                    current + 2
                } else {
                    current + 1
                }
            }

            'J' => self.step_j(current),

            'K' => {
                self.add("K");
                if self.at(current + 1) == 'K' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'L' => {
                if self.at(current + 1) == 'L' {
                    // Spanish 'll', e.g. 'cabrillo', 'gallegos': primary
                    // keeps the L, alternate drops it.
                    if (current == self.len - 3
                        && self.string_at(current - 1, 4, &["ILLO", "ILLA", "ALLE"]))
                        || ((self.string_at(self.last - 1, 2, &["AS", "OS"])
                            || self.string_at(self.last, 1, &["A", "O"]))
                            && self.string_at(current - 1, 4, &["ALLE"]))
                    {
                        self.add2("L", "");
                    } else {
                        self.add("L");
                    }
                    current + 2
                } else {
                    self.add("L");
                    current + 1
                }
            }

            'M' => {
                self.add("M");
                // 'dumb', 'thumb'
                if (self.string_at(current - 1, 3, &["UMB"])
                    && (current + 1 == self.last || self.string_at(current + 2, 2, &["ER"])))
                    || self.at(current + 1) == 'M'
                {
                    current + 2
                } else {
                    current + 1
                }
            }

            'N' => {
                self.add("N");
                if self.at(current + 1) == 'N' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'Ñ' => {
                self.add("N");
                current + 1
            }

            'P' => {
                if self.at(current + 1) == 'H' {
                    self.add("F");
                    current + 2
                } else {
                    self.add("P");
                    // 'campbell', 'raspberry'
                    if matches!(self.at(current + 1), 'P' | 'B') {
                        current + 2
                    } else {
                        current + 1
                    }
                }
            }

            'Q' => {
                self.add("K");
                if self.at(current + 1) == 'Q' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'R' => {
                // French final '-ier', e.g. 'rogier', but not 'hochmeier'.
                if current == self.last
                    && !self.slavo_germanic
                    && self.string_at(current - 2, 2, &["IE"])
                    && !self.string_at(current - 4, 2, &["ME", "MA"])
                {
                    self.add2("", "R");
                } else {
                    self.add("R");
                }
                if self.at(current + 1) == 'R' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'S' => self.step_s(current),

            'T' => {
                if self.string_at(current, 4, &["TION"]) {
                    self.add("X");
                    current + 3
                } else if self.string_at(current, 3, &["TIA", "TCH"]) {
                    self.add("X");
                    current + 3
                } else if self.string_at(current, 2, &["TH"]) || self.string_at(current, 3, &["TTH"])
                {
                    // 'thomas', 'thames', or Germanic
                    if self.string_at(current + 2, 2, &["OM", "AM"])
                        || self.string_at(0, 4, &["VAN ", "VON "])
                        || self.string_at(0, 3, &["SCH"])
                    {
                        self.add("T");
                    } else {
                        self.add2("0", "T");
                    }
                    current + 2
                } else {
                    self.add("T");
                    if self.string_at(current + 1, 1, &["T", "D"]) {
                        current + 2
                    } else {
                        current + 1
                    }
                }
            }

            'V' => {
                self.add("F");
                if self.at(current + 1) == 'V' {
                    current + 2
                } else {
                    current + 1
                }
            }

            'W' => self.step_w(current),

            'X' => {
                // French final '-eaux', 'breaux'
                if !(current == self.last
                    && (self.string_at(current - 3, 3, &["IAU", "EAU"])
                        || self.string_at(current - 2, 2, &["AU", "OU"])))
                {
                    self.add("KS");
                }
                if self.string_at(current + 1, 1, &["C", "X"]) {
                    current + 2
                } else {
                    current + 1
                }
            }

            'Z' => {
                // Chinese pinyin, e.g. 'zhao'
                if self.at(current + 1) == 'H' {
                    self.add("J");
                    current + 2
                } else {
                    if self.string_at(current + 1, 2, &["ZO", "ZI", "ZA"])
                        || (self.slavo_germanic && current > 0 && self.at(current - 1) != 'T')
                    {
                        self.add2("S", "TS");
                    } else {
                        self.add("S");
                    }
                    if self.at(current + 1) == 'Z' {
                        current + 2
                    } else {
                        current + 1
                    }
                }
            }

            // No rule: digits, punctuation, unhandled letters.
            _ => current + 1,
        }
    }

    fn step_c(&mut self, current: isize) -> isize {
        // Germanic '-ach-', e.g. 'bacher', but not 'macho'
        if current > 1
            && !self.is_vowel(current - 2)
            && self.string_at(current - 1, 3, &["ACH"])
            && (self.at(current + 2) != 'I'
                && (self.at(current + 2) != 'E'
                    || self.string_at(current - 2, 6, &["BACHER", "MACHER"])))
        {
            self.add("K");
            return current + 2;
        }

        // 'caesar'
        if current == 0 && self.string_at(current, 6, &["CAESAR"]) {
            self.add("S");
            return current + 2;
        }

        // Italian 'chianti'
        if self.string_at(current, 4, &["CHIA"]) {
            self.add("K");
            return current + 2;
        }

        if self.string_at(current, 2, &["CH"]) {
            // 'michael'
            if current > 0 && self.string_at(current, 4, &["CHAE"]) {
                self.add2("K", "X");
                return current + 2;
            }

            // Greek roots, e.g. 'chemistry', 'chorus'
            if current == 0
                && (self.string_at(current + 1, 5, &["HARAC", "HARIS"])
                    || self.string_at(current + 1, 3, &["HOR", "HYM", "HIA", "HEM"]))
                && !self.string_at(0, 5, &["CHORE"])
            {
                self.add("K");
                return current + 2;
            }

            // Germanic, Greek, or otherwise 'ch' as 'kh'
            if (self.string_at(0, 4, &["VAN ", "VON "]) || self.string_at(0, 3, &["SCH"]))
                // 'architect' but not 'arch'
                || self.string_at(current - 2, 6, &["ORCHES", "ARCHIT", "ORCHID"])
                || self.string_at(current + 2, 1, &["T", "S"])
                || ((self.string_at(current - 1, 1, &["A", "O", "U", "E"]) || current == 0)
                    // 'wachtler', 'wechsler', but not 'tichner'
                    && self.string_at(
                        current + 2,
                        1,
                        &["L", "R", "N", "M", "B", "H", "F", "V", "W", " "],
                    ))
            {
                self.add("K");
            } else if current > 0 {
                if self.string_at(0, 2, &["MC"]) {
                    // 'McHugh'
                    self.add("K");
                } else {
                    self.add2("X", "K");
                }
            } else {
                self.add("X");
            }
            return current + 2;
        }

        // 'czerny'
        if self.string_at(current, 2, &["CZ"]) && !self.string_at(current - 2, 4, &["WICZ"]) {
            self.add2("S", "X");
            return current + 2;
        }

        // 'focaccia'
        if self.string_at(current + 1, 3, &["CIA"]) {
            self.add("X");
            return current + 3;
        }

        // Double 'C', but not 'McClellan'
        if self.string_at(current, 2, &["CC"]) && !(current == 1 && self.at(0) == 'M') {
            // 'bellocchio' but not 'bacchus'
            if self.string_at(current + 2, 1, &["I", "E", "H"])
                && !self.string_at(current + 2, 2, &["HU"])
            {
                // 'accident', 'accede', 'succeed'
                if (current == 1 && self.at(current - 1) == 'A')
                    || self.string_at(current - 1, 5, &["UCCEE", "UCCES"])
                {
                    self.add("KS");
                } else {
                    // 'bacci', 'bertucci'
                    self.add("X");
                }
                return current + 3;
            }
            // Pierce's rule
            self.add("K");
            return current + 2;
        }

        if self.string_at(current, 2, &["CK", "CG", "CQ"]) {
            self.add("K");
            return current + 2;
        }

        if self.string_at(current, 2, &["CI", "CE", "CY"]) {
            // Italian vs. English
            if self.string_at(current, 3, &["CIO", "CIE", "CIA"]) {
                self.add2("S", "X");
            } else {
                self.add("S");
            }
            return current + 2;
        }

        self.add("K");
        // 'mac caffrey', 'mac gregor'
        if self.string_at(current + 1, 2, &[" C", " Q", " G"]) {
            current + 3
        } else if self.string_at(current + 1, 1, &["C", "K", "Q"])
            && !self.string_at(current + 1, 2, &["CE", "CI"])
        {
            current + 2
        } else {
            current + 1
        }
    }

    fn step_g(&mut self, current: isize) -> isize {
        if self.at(current + 1) == 'H' {
            if current > 0 && !self.is_vowel(current - 1) {
                self.add("K");
                return current + 2;
            }
            if current == 0 {
                // 'ghislane', 'ghiradelli'
                if self.at(current + 2) == 'I' {
                    self.add("J");
                } else {
                    self.add("K");
                }
                return current + 2;
            }
            // Parker's rule (with further refinements), e.g. 'hugh'
            if (current > 1 && self.string_at(current - 2, 1, &["B", "H", "D"]))
                // 'bough'
                || (current > 2 && self.string_at(current - 3, 1, &["B", "H", "D"]))
                // 'broughton'
                || (current > 3 && self.string_at(current - 4, 1, &["B", "H"]))
            {
                return current + 2;
            }
            // 'laugh', 'McLaughlin', 'cough', 'gough', 'rough', 'tough'
            if current > 2
                && self.at(current - 1) == 'U'
                && self.string_at(current - 3, 1, &["C", "G", "L", "R", "T"])
            {
                self.add("F");
            } else if current > 0 && self.at(current - 1) != 'I' {
                self.add("K");
            }
            return current + 2;
        }

        if self.at(current + 1) == 'N' {
            if current == 1 && self.is_vowel(0) && !self.slavo_germanic {
                self.add2("KN", "N");
            } else if !self.string_at(current + 2, 2, &["EY"])
                && self.at(current + 1) != 'Y'
                && !self.slavo_germanic
            {
                // not 'cagney'
                self.add2("N", "KN");
            } else {
                self.add("KN");
            }
            return current + 2;
        }

        // 'tagliaro'
        if self.string_at(current + 1, 2, &["LI"]) && !self.slavo_germanic {
            self.add2("KL", "L");
            return current + 2;
        }

        // '-ges-', '-gep-', '-gel-', '-gie-' at beginning
        if current == 0
            && (self.at(current + 1) == 'Y'
                || self.string_at(
                    current + 1,
                    2,
                    &["ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"],
                ))
        {
            self.add2("K", "J");
            return current + 2;
        }

        // '-ger-', '-gy-'
        if (self.string_at(current + 1, 2, &["ER"]) || self.at(current + 1) == 'Y')
            && !self.string_at(0, 6, &["DANGER", "RANGER", "MANGER"])
            && !self.string_at(current - 1, 1, &["E", "I"])
            && !self.string_at(current - 1, 3, &["RGY", "OGY"])
        {
            self.add2("K", "J");
            return current + 2;
        }

        // Italian, e.g. 'biaggi'
        if self.string_at(current + 1, 1, &["E", "I", "Y"])
            || self.string_at(current - 1, 4, &["AGGI", "OGGI"])
        {
            // obviously Germanic
            if self.string_at(0, 4, &["VAN ", "VON "])
                || self.string_at(0, 3, &["SCH"])
                || self.string_at(current + 1, 2, &["ET"])
            {
                self.add("K");
            } else if self.string_at(current + 1, 4, &["IER "]) {
                // always soft at a French ending
                self.add("J");
            } else {
                self.add2("J", "K");
            }
            return current + 2;
        }

        self.add("K");
        if self.at(current + 1) == 'G' {
            current + 2
        } else {
            current + 1
        }
    }

    fn step_j(&mut self, current: isize) -> isize {
        // Obvious Spanish, 'jose', 'san jacinto'
        if self.string_at(current, 4, &["JOSE"]) || self.string_at(0, 4, &["SAN "]) {
            if (current == 0 && self.at(current + 4) == ' ') || self.string_at(0, 4, &["SAN "]) {
                self.add("H");
            } else {
                self.add2("J", "H");
            }
            return current + 1;
        }

        if current == 0 {
            // 'Yankelovich' / 'Jankelowicz'
            self.add2("J", "A");
        } else if self.is_vowel(current - 1)
            && !self.slavo_germanic
            && matches!(self.at(current + 1), 'A' | 'O')
        {
            // Spanish pronunciation, e.g. 'bajador'
            self.add2("J", "H");
        } else if current == self.last {
            self.add2("J", " ");
        } else if !self.string_at(current + 1, 1, &["L", "T", "K", "S", "N", "M", "B", "Z"])
            && !self.string_at(current - 1, 1, &["S", "K", "L"])
        {
            self.add("J");
        }
        // else silent, e.g. 'fjord'

        if self.at(current + 1) == 'J' {
            current + 2
        } else {
            current + 1
        }
    }

    fn step_s(&mut self, current: isize) -> isize {
        // Silent in 'island', 'isle', 'carlisle'
        if self.string_at(current - 1, 3, &["ISL", "YSL"]) {
            return current + 1;
        }

        // 'sugar-'
        if current == 0 && self.string_at(current, 5, &["SUGAR"]) {
            self.add2("X", "S");
            return current + 1;
        }

        if self.string_at(current, 2, &["SH"]) {
            // Germanic
            if self.string_at(current + 1, 4, &["HEIM", "HOEK", "HOLM", "HOLZ"]) {
                self.add("S");
            } else {
                self.add("X");
            }
            return current + 2;
        }

        // Italian and Armenian
        if self.string_at(current, 3, &["SIO", "SIA"]) || self.string_at(current, 4, &["SIAN"]) {
            if !self.slavo_germanic {
                self.add2("S", "X");
            } else {
                self.add("S");
            }
            return current + 3;
        }

        // German & Anglicisations, e.g. 'smith' matching 'schmidt',
        // 'snider' matching 'schneider'
        if (current == 0 && self.string_at(current + 1, 1, &["M", "N", "L", "W"]))
            || self.string_at(current + 1, 1, &["Z"])
        {
            self.add2("S", "X");
            if self.string_at(current + 1, 1, &["Z"]) {
                return current + 2;
            }
            return current + 1;
        }

        if self.string_at(current, 2, &["SC"]) {
            // Schlesinger's rule
            if self.at(current + 2) == 'H' {
                // Dutch origin, e.g. 'school', 'schooner'
                if self.string_at(current + 3, 2, &["OO", "ER", "EN", "UY", "ED", "EM"]) {
                    // 'schermerhorn', 'schenker'
                    if self.string_at(current + 3, 2, &["ER", "EN"]) {
                        self.add2("X", "SK");
                    } else {
                        self.add("SK");
                    }
                    return current + 3;
                }
                if current == 0 && !self.is_vowel(3) && self.at(3) != 'W' {
                    self.add2("X", "S");
                } else {
                    self.add("X");
                }
                return current + 3;
            }
            if self.string_at(current + 2, 1, &["I", "E", "Y"]) {
                self.add("S");
                return current + 3;
            }
            self.add("SK");
            return current + 3;
        }

        // French, e.g. 'resnais', 'artois'
        if current == self.last && self.string_at(current - 2, 2, &["AI", "OI"]) {
            self.add2("", "S");
        } else {
            self.add("S");
        }
        if self.string_at(current + 1, 1, &["S", "Z"]) {
            current + 2
        } else {
            current + 1
        }
    }

    fn step_w(&mut self, current: isize) -> isize {
        // Can also be in the middle of a word
        if self.string_at(current, 2, &["WR"]) {
            self.add("R");
            return current + 2;
        }

        if current == 0 && (self.is_vowel(current + 1) || self.string_at(current, 2, &["WH"])) {
            if self.is_vowel(current + 1) {
                // 'Wasserman' should match 'Vasserman'
                self.add2("A", "F");
            } else {
                // need 'Uomo' to match 'Womo'
                self.add("A");
            }
            return current + 1;
        }

        // 'Arnow' should match 'Arnoff'
        if (current == self.last && self.is_vowel(current - 1))
            || self.string_at(current - 1, 5, &["EWSKI", "EWSKY", "OWSKI", "OWSKY"])
            || self.string_at(0, 3, &["SCH"])
        {
            self.add2("", "F");
            return current + 1;
        }

        // Polish, e.g. 'filipowicz'
        if self.string_at(current, 4, &["WICZ", "WITZ"]) {
            self.add2("TS", "FX");
            return current + 4;
        }

        // else skip it
        current + 1
    }
}
