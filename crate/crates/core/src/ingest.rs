//! Transaction parsing, risk and label tables, and aggregation into
//! temporal layers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use log::warn;

use crate::error::{Error, Result};
use crate::graph::{NodeSet, TemporalLayer};

/// Money amount held exactly in millionths of a euro.
///
/// Sums are carried in `i128`, so accumulation is exact; conversion to `f64`
/// for edge weights happens once per merged edge and is exact up to 2^53
/// micro-units (about 9 billion euros per edge).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(i128);

impl Amount {
    pub const SCALE: i128 = 1_000_000;

    pub fn from_micros(micros: i128) -> Self {
        Amount(micros)
    }

    pub fn from_cents(cents: i64) -> Self {
        Amount(cents as i128 * 10_000)
    }

    pub fn micros(self) -> i128 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }
}

impl std::ops::Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::default(), |a, b| a + b)
    }
}

impl FromStr for Amount {
    type Err = String;

    /// Plain non-negative decimal, at most six fractional digits.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let body = s.strip_prefix('+').unwrap_or(s);
        if body.starts_with('-') {
            return Err(format!("negative amount `{s}`"));
        }
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(format!("empty amount `{s}`"));
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("not a decimal number `{s}`"));
        }
        if frac.len() > 6 {
            return Err(format!("more than 6 decimals in `{s}`"));
        }
        if int.len() > 24 {
            return Err(format!("amount `{s}` out of range"));
        }
        let int_part: i128 = if int.is_empty() { 0 } else { int.parse().map_err(|_| format!("bad amount `{s}`"))? };
        let mut frac_part: i128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| format!("bad amount `{s}`"))? };
        for _ in frac.len()..6 {
            frac_part *= 10;
        }
        Ok(Amount(int_part * Self::SCALE + frac_part))
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int = self.0 / Self::SCALE;
        let frac = self.0 % Self::SCALE;
        if frac == 0 {
            write!(f, "{int}.00")
        } else {
            let digits = format!("{frac:06}");
            let trimmed = digits.trim_end_matches('0');
            if trimmed.len() < 2 {
                write!(f, "{int}.{:0<2}", trimmed)
            } else {
                write!(f, "{int}.{trimmed}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Sepa,
    Swift,
}

impl FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SEPA" => Ok(Source::Sepa),
            "SWIFT" => Ok(Source::Swift),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Sepa => "SEPA",
            Source::Swift => "SWIFT",
        })
    }
}

/// One money transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub date: NaiveDate,
    pub transaction_id: String,
    pub sender_bic: String,
    pub receiver_bic: String,
    pub sender_iban: Option<String>,
    pub receiver_iban: Option<String>,
    pub sender_country_residence: String,
    pub receiver_country_residence: String,
    pub sender_country_bank: String,
    pub receiver_country_bank: String,
    pub amount: Amount,
    pub currency: String,
    pub source: Source,
}

/// Column roles of the transaction file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Date,
    TransactionId,
    SenderBic,
    ReceiverBic,
    SenderIban,
    ReceiverIban,
    SenderCountryResidence,
    ReceiverCountryResidence,
    SenderCountryBank,
    ReceiverCountryBank,
    Amount,
    Currency,
    Source,
}

impl Role {
    pub const ALL: [Role; 13] = [
        Role::Date,
        Role::TransactionId,
        Role::SenderBic,
        Role::ReceiverBic,
        Role::SenderIban,
        Role::ReceiverIban,
        Role::SenderCountryResidence,
        Role::ReceiverCountryResidence,
        Role::SenderCountryBank,
        Role::ReceiverCountryBank,
        Role::Amount,
        Role::Currency,
        Role::Source,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Date => "date",
            Role::TransactionId => "transaction_id",
            Role::SenderBic => "sender_bic",
            Role::ReceiverBic => "receiver_bic",
            Role::SenderIban => "sender_iban",
            Role::ReceiverIban => "receiver_iban",
            Role::SenderCountryResidence => "sender_country_residence",
            Role::ReceiverCountryResidence => "receiver_country_residence",
            Role::SenderCountryBank => "sender_country_bank",
            Role::ReceiverCountryBank => "receiver_country_bank",
            Role::Amount => "amount",
            Role::Currency => "currency",
            Role::Source => "source",
        }
    }

    /// IBAN columns may be absent from the header altogether.
    pub fn is_mandatory(self) -> bool {
        !matches!(self, Role::SenderIban | Role::ReceiverIban)
    }
}

impl FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Role::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown column role `{s}`"))
    }
}

/// Maps column roles to header names. Defaults to the role names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: BTreeMap<Role, String>,
    pub delimiter: u8,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            columns: Role::ALL.iter().map(|r| (*r, r.name().to_string())).collect(),
            delimiter: b',',
        }
    }
}

impl Schema {
    pub fn with_column(mut self, role: Role, header: impl Into<String>) -> Self {
        self.columns.insert(role, header.into());
        self
    }

    pub fn column(&self, role: Role) -> &str {
        &self.columns[&role]
    }

    /// Applies `role=header` overrides; `delimiter` is also accepted as a key.
    pub fn apply<'a, I>(mut self, pairs: I) -> std::result::Result<Self, String>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        for (k, v) in pairs {
            if k == "delimiter" {
                self.delimiter = parse_delimiter(v)?;
            } else {
                let role: Role = k.parse()?;
                self.columns.insert(role, v.to_string());
            }
        }
        Ok(self)
    }
}

pub fn parse_delimiter(v: &str) -> std::result::Result<u8, String> {
    match v {
        "\\t" | "tab" => Ok(b'\t'),
        "comma" => Ok(b','),
        "semicolon" => Ok(b';'),
        s if s.len() == 1 => Ok(s.as_bytes()[0]),
        s => Err(format!("delimiter must be a single byte, got `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

/// Result of parsing a transaction file.
#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub transactions: Vec<Transaction>,
    pub rejections: Vec<Rejection>,
    /// Data rows read, accepted or not.
    pub rows: usize,
}

/// Parses a delimited transaction file. Malformed rows end up in the
/// rejection list with their line number; header problems are fatal.
pub fn parse_transactions<R: Read>(input: R, schema: &Schema) -> Result<ParseReport> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let mut index: HashMap<Role, usize> = HashMap::new();
    for role in Role::ALL {
        let name = schema.column(role);
        match headers.iter().position(|h| h == name) {
            Some(i) => {
                index.insert(role, i);
            }
            None if role.is_mandatory() => {
                return Err(Error::MissingColumn {
                    role: role.name(),
                    column: name.to_string(),
                })
            }
            None => {}
        }
    }

    let mut report = ParseReport::default();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            // unreadable bytes mid-stream (e.g. invalid UTF-8) are per-row
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
                report.rows += 1;
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                report.rejections.push(Rejection { line, reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e.into()),
        }
        report.rows += 1;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match row_to_transaction(&record, &index, headers.len()) {
            Ok(tx) => report.transactions.push(tx),
            Err(reason) => report.rejections.push(Rejection { line, reason }),
        }
    }
    Ok(report)
}

fn row_to_transaction(
    record: &csv::StringRecord,
    index: &HashMap<Role, usize>,
    width: usize,
) -> std::result::Result<Transaction, String> {
    if record.len() != width {
        return Err(format!("expected {width} fields, found {}", record.len()));
    }
    let get = |role: Role| index.get(&role).map(|&i| record.get(i).unwrap_or("")).unwrap_or("");
    let required = |role: Role| {
        let v = get(role);
        if v.is_empty() {
            Err(format!("empty {}", role.name()))
        } else {
            Ok(v.to_string())
        }
    };
    let optional = |role: Role| Some(get(role)).filter(|v| !v.is_empty()).map(str::to_string);

    let date_raw = required(Role::Date)?;
    let date = NaiveDate::parse_from_str(&date_raw, "%Y-%m-%d")
        .map_err(|_| format!("invalid date `{date_raw}`"))?;
    let amount: Amount = required(Role::Amount)?.parse()?;
    let source: Source = required(Role::Source)?.parse()?;

    Ok(Transaction {
        date,
        transaction_id: required(Role::TransactionId)?,
        sender_bic: required(Role::SenderBic)?,
        receiver_bic: required(Role::ReceiverBic)?,
        sender_iban: optional(Role::SenderIban),
        receiver_iban: optional(Role::ReceiverIban),
        sender_country_residence: required(Role::SenderCountryResidence)?,
        receiver_country_residence: required(Role::ReceiverCountryResidence)?,
        sender_country_bank: required(Role::SenderCountryBank)?,
        receiver_country_bank: required(Role::ReceiverCountryBank)?,
        amount,
        currency: required(Role::Currency)?,
        source,
    })
}

/// Writes transactions with the default header names.
pub fn write_transactions_csv<W: std::io::Write>(txs: &[Transaction], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(Role::ALL.iter().map(|r| r.name()))?;
    for t in txs {
        w.write_record([
            t.date.format("%Y-%m-%d").to_string(),
            t.transaction_id.clone(),
            t.sender_bic.clone(),
            t.receiver_bic.clone(),
            t.sender_iban.clone().unwrap_or_default(),
            t.receiver_iban.clone().unwrap_or_default(),
            t.sender_country_residence.clone(),
            t.receiver_country_residence.clone(),
            t.sender_country_bank.clone(),
            t.receiver_country_bank.clone(),
            t.amount.to_string(),
            t.currency.clone(),
            t.source.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Which transaction fields name the endpoints of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregationLevel {
    /// Bank-country codes.
    Country,
    Bic,
    Iban,
}

impl AggregationLevel {
    pub fn endpoints<'a>(&self, tx: &'a Transaction) -> Option<(&'a str, &'a str)> {
        match self {
            AggregationLevel::Country => Some((&tx.sender_country_bank, &tx.receiver_country_bank)),
            AggregationLevel::Bic => Some((&tx.sender_bic, &tx.receiver_bic)),
            AggregationLevel::Iban => match (&tx.sender_iban, &tx.receiver_iban) {
                (Some(s), Some(r)) => Some((s, r)),
                _ => None,
            },
        }
    }
}

impl FromStr for AggregationLevel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "country" => Ok(AggregationLevel::Country),
            "bic" => Ok(AggregationLevel::Bic),
            "iban" => Ok(AggregationLevel::Iban),
            other => Err(format!("unknown aggregation level `{other}`")),
        }
    }
}

impl fmt::Display for AggregationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregationLevel::Country => "country",
            AggregationLevel::Bic => "bic",
            AggregationLevel::Iban => "iban",
        })
    }
}

/// Calendar bucketing of transaction dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalSpec {
    /// Calendar months labeled `YYYY-MM`.
    #[default]
    Monthly,
    /// Fixed-width windows of `days` days starting at `start` (or at the
    /// earliest date when `None`), labeled by their first day.
    Days { start: Option<NaiveDate>, days: u32 },
}

impl IntervalSpec {
    fn bucket(&self, date: NaiveDate, origin: NaiveDate) -> i64 {
        match self {
            IntervalSpec::Monthly => date.year() as i64 * 12 + date.month0() as i64,
            IntervalSpec::Days { start, days } => {
                let base = start.unwrap_or(origin);
                (date - base).num_days().div_euclid(*days as i64)
            }
        }
    }

    fn label(&self, bucket: i64, origin: NaiveDate) -> String {
        match self {
            IntervalSpec::Monthly => format!("{:04}-{:02}", bucket.div_euclid(12), bucket.rem_euclid(12) + 1),
            IntervalSpec::Days { start, days } => {
                let base = start.unwrap_or(origin);
                (base + chrono::Duration::days(bucket * *days as i64)).format("%Y-%m-%d").to_string()
            }
        }
    }
}

impl FromStr for IntervalSpec {
    type Err = String;
    /// `month` or `days:N`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "month" | "monthly" => Ok(IntervalSpec::Monthly),
            other => {
                let n = other
                    .strip_prefix("days:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|n| *n > 0)
                    .ok_or_else(|| format!("unknown interval spec `{other}`"))?;
                Ok(IntervalSpec::Days { start: None, days: n })
            }
        }
    }
}

/// Aggregates transactions into one layer per interval over the universal
/// node set of the input. Edge weight is the summed amount of all `i -> j`
/// transfers in the interval. Empty intervals between the first and last
/// date are kept as edgeless layers.
pub fn aggregate(
    transactions: &[Transaction],
    level: AggregationLevel,
    intervals: &IntervalSpec,
) -> Result<Vec<TemporalLayer>> {
    if transactions.is_empty() {
        return Err(Error::NoTransactions);
    }
    let unusable = transactions.iter().filter(|t| level.endpoints(t).is_none()).count();
    if unusable > 0 {
        return Err(Error::MissingIban { unusable });
    }
    let origin = transactions.iter().map(|t| t.date).min().expect("non-empty");

    let mut ids: BTreeSet<&str> = BTreeSet::new();
    let mut buckets: BTreeMap<i64, BTreeMap<(&str, &str), Amount>> = BTreeMap::new();
    for t in transactions {
        let (s, d) = level.endpoints(t).expect("checked above");
        ids.insert(s);
        ids.insert(d);
        let b = intervals.bucket(t.date, origin);
        *buckets.entry(b).or_default().entry((s, d)).or_default() += t.amount;
    }
    let nodes = NodeSet::new(ids.iter().copied());
    let first = *buckets.keys().next().expect("non-empty");
    let last = *buckets.keys().next_back().expect("non-empty");

    (first..=last)
        .map(|b| {
            let label = intervals.label(b, origin);
            let edges = buckets
                .get(&b)
                .into_iter()
                .flatten()
                .filter(|(_, amt)| amt.micros() > 0)
                .map(|((s, d), amt)| {
                    Ok((nodes.require(s)?, nodes.require(d)?, amt.to_f64()))
                })
                .collect::<Result<Vec<_>>>()?;
            TemporalLayer::new(label, nodes.clone(), edges)
        })
        .collect()
}

/// Keeps transactions with `from <= date <= to`.
pub fn filter_dates(txs: Vec<Transaction>, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Vec<Transaction> {
    txs.into_iter()
        .filter(|t| from.is_none_or(|f| t.date >= f) && to.is_none_or(|e| t.date <= e))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RiskLevel {
    Low,
    Medium,
    High,
}

impl FromStr for RiskLevel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(RiskLevel::Low),
            "medium" => Ok(RiskLevel::Medium),
            "high" => Ok(RiskLevel::High),
            other => Err(other.to_string()),
        }
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskLevel::Low => "low",
            RiskLevel::Medium => "medium",
            RiskLevel::High => "high",
        })
    }
}

/// Country code to risk level, with an explicit default for unlisted codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskTable {
    levels: BTreeMap<String, RiskLevel>,
    default: RiskLevel,
}

impl RiskTable {
    pub fn new(default: RiskLevel) -> Self {
        RiskTable { levels: BTreeMap::new(), default }
    }

    pub fn with(mut self, code: impl Into<String>, level: RiskLevel) -> Self {
        self.levels.insert(code.into(), level);
        self
    }

    pub fn lookup(&self, code: &str) -> RiskLevel {
        self.levels.get(code).copied().unwrap_or(self.default)
    }

    pub fn default_level(&self) -> RiskLevel {
        self.default
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, RiskLevel)> {
        self.levels.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A loaded table plus the warnings raised while loading it.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

fn read_pairs<R: Read>(input: R, header_tokens: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && fields.get(1).is_some_and(|f| header_tokens.contains(&f.to_ascii_lowercase().as_str())) {
            continue;
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

/// Reads `code,level` rows. A row with code `*` sets the default.
/// Repeated codes keep the last level and raise a warning.
pub fn load_risk_table<R: Read>(input: R, default: RiskLevel) -> Result<Loaded<RiskTable>> {
    let mut table = RiskTable::new(default);
    let mut warnings = Vec::new();
    for (line, fields) in read_pairs(input, &["level", "risk", "risk_level"])? {
        let code = fields[0].clone();
        let token = fields.get(1).cloned().unwrap_or_default();
        let level: RiskLevel = token
            .parse()
            .map_err(|token| Error::UnknownLevel { token, line })?;
        if code == "*" {
            table.default = level;
            continue;
        }
        if let Some(prev) = table.levels.insert(code.clone(), level) {
            let msg = format!("line {line}: duplicate risk entry for `{code}` ({prev} replaced by {level})");
            warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(Loaded { value: table, warnings })
}

/// Relevance annotations for returned outliers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSet {
    relevance: BTreeMap<String, bool>,
    risk: BTreeMap<String, RiskLevel>,
}

impl LabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: impl Into<String>, relevant: bool) -> Self {
        self.relevance.insert(id.into(), relevant);
        self
    }

    /// `None` when the id was never annotated.
    pub fn relevance(&self, id: &str) -> Option<bool> {
        self.relevance.get(id).copied()
    }

    pub fn is_relevant(&self, id: &str) -> bool {
        self.relevance(id).unwrap_or(false)
    }

    pub fn risk(&self, id: &str) -> Option<RiskLevel> {
        self.risk.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.relevance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevance.is_empty()
    }

    pub fn relevant_ids(&self) -> impl Iterator<Item = &str> {
        self.relevance.iter().filter(|(_, r)| **r).map(|(k, _)| k.as_str())
    }
}

fn parse_flag(token: &str) -> Option<bool> {
    match token.trim().to_ascii_lowercase().as_str() {
        "relevant" | "1" | "true" | "yes" | "tp" => Some(true),
        "not-relevant" | "not_relevant" | "irrelevant" | "0" | "false" | "no" | "fp" => Some(false),
        _ => None,
    }
}

/// Reads `id,flag[,risk]` rows. Flags: `relevant`/`not-relevant`
/// (also `1`/`0`, `true`/`false`, `yes`/`no`).
pub fn load_labels<R: Read>(input: R) -> Result<Loaded<LabelSet>> {
    let mut labels = LabelSet::new();
    let mut warnings = Vec::new();
    for (line, fields) in read_pairs(input, &["flag", "relevance", "relevant", "label"])? {
        let id = fields[0].clone();
        let token = fields.get(1).cloned().unwrap_or_default();
        let flag = parse_flag(&token).ok_or_else(|| Error::UnknownLevel { token: token.clone(), line })?;
        if let Some(risk) = fields.get(2).filter(|r| !r.is_empty()) {
            let level: RiskLevel = risk
                .parse()
                .map_err(|token| Error::UnknownLevel { token, line })?;
            labels.risk.insert(id.clone(), level);
        }
        if labels.relevance.insert(id.clone(), flag).is_some() {
            let msg = format!("line {line}: duplicate label for `{id}`, keeping the last one");
            warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(Loaded { value: labels, warnings })
}

/// Country of every node at `level`, from the bank-country fields of the
/// transactions mentioning it. Conflicts are settled by majority; ties go to
/// the riskier country, then to the smaller code.
pub fn node_countries(
    transactions: &[Transaction],
    level: AggregationLevel,
    risk: Option<&RiskTable>,
) -> BTreeMap<String, String> {
    let mut votes: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for t in transactions {
        let Some((s, d)) = level.endpoints(t) else { continue };
        *votes.entry(s).or_default().entry(&t.sender_country_bank).or_default() += 1;
        *votes.entry(d).or_default().entry(&t.receiver_country_bank).or_default() += 1;
    }
    votes
        .into_iter()
        .map(|(node, counts)| {
            let winner = majority(&counts, |c| risk.map(|r| r.lookup(c)));
            (node.to_string(), winner.to_string())
        })
        .collect()
}

fn majority<'a, K: Ord + Copy>(counts: &BTreeMap<&'a str, usize>, rank: impl Fn(&str) -> Option<K>) -> &'a str {
    // BTreeMap iterates codes ascending; strict comparisons keep the smaller code on full ties
    let mut best: Option<(&str, usize, Option<K>)> = None;
    for (&code, &n) in counts {
        let r = rank(code);
        let better = match best {
            None => true,
            Some((_, bn, br)) => n > bn || (n == bn && r > br),
        };
        if better {
            best = Some((code, n, r));
        }
    }
    best.map(|b| b.0).unwrap_or("")
}

/// The BIC each IBAN belongs to, by majority over the rows mentioning it.
pub fn iban_owners(transactions: &[Transaction]) -> BTreeMap<String, String> {
    let mut votes: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for t in transactions {
        if let Some(i) = &t.sender_iban {
            *votes.entry(i).or_default().entry(&t.sender_bic).or_default() += 1;
        }
        if let Some(i) = &t.receiver_iban {
            *votes.entry(i).or_default().entry(&t.receiver_bic).or_default() += 1;
        }
    }
    votes
        .into_iter()
        .map(|(iban, counts)| (iban.to_string(), majority(&counts, |_| None::<u8>).to_string()))
        .collect()
}
