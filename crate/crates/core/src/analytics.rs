//! Usage report over the server hit log and the client action store.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::logbatch::ACTION_NAMES;
use crate::msisdn::normalize_msisdn;
use crate::records::{ActionLine, HitRecord, REFUSED_NODE};

/// Client actions further apart than this start a new session.
pub const CLIENT_SESSION_GAP: u64 = 180;
/// Active dates are counted in East Africa Time (UTC+3).
pub const DATE_OFFSET_SECS: u64 = 3 * 3600;

const RESERVED_INPUTS: [&str; 4] = ["0", "96", "98", "99"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("demographics: {0}")]
    Demographics(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionCounts {
    pub ussd: u64,
    pub client: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetailVisits {
    pub total: u64,
    pub per_user_mean: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlatformSummary {
    pub users: u64,
    pub sessions: u64,
    /// USSD: user-entered inputs. Client: logged actions.
    pub events: u64,
    pub events_per_user: f64,
    pub active_dates_per_user: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Platforms {
    pub ussd: PlatformSummary,
    pub client: PlatformSummary,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserUsage {
    pub msisdn: String,
    pub ussd_sessions: u64,
    pub client_sessions: u64,
    pub detail_visits: u64,
    pub back_uses: u64,
    pub text_searches: u64,
    pub filter_searches: u64,
    pub ussd_inputs: u64,
    pub client_actions: u64,
    pub active_dates: u64,
    pub ussd_active_dates: u64,
    pub client_active_dates: u64,
    pub session_seconds: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub users: u64,
    pub sessions_mean: f64,
    pub detail_visits_mean: f64,
    pub active_dates_mean: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub hitlog: u64,
    pub actions: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UsageReport {
    pub unique_users: u64,
    pub sessions: SessionCounts,
    pub sessions_per_user: f64,
    pub detail_visits: DetailVisits,
    pub action_histogram: BTreeMap<String, u64>,
    pub back_uses: u64,
    pub text_searches: u64,
    pub filter_searches: u64,
    pub ussd_inputs: u64,
    pub active_dates_per_user: f64,
    pub session_duration_mean_secs: f64,
    pub refused_hits: u64,
    pub platforms: Platforms,
    pub users: Vec<UserUsage>,
    /// column -> value -> summary of the users with that value.
    pub demographics: BTreeMap<String, BTreeMap<String, GroupSummary>>,
    pub skipped_lines: Skipped,
}

fn mean(sum: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

fn day(ts: u64) -> u64 {
    (ts + DATE_OFFSET_SECS) / 86_400
}

fn lines(bytes: &[u8]) -> impl Iterator<Item = Result<&str, ()>> {
    bytes
        .split(|b| *b == b'\n')
        .filter(|l| !l.iter().all(u8::is_ascii_whitespace))
        .map(|l| std::str::from_utf8(l).map_err(|_| ()))
}

#[derive(Default)]
struct Acc {
    usage: UserUsage,
    days: BTreeSet<u64>,
    ussd_days: BTreeSet<u64>,
    client_days: BTreeSet<u64>,
}

/// Builds the report from raw file contents. Malformed log lines are skipped
/// and counted; only a malformed demographics table is an error.
pub fn report(hitlog: &[u8], actions: &[u8], demographics: Option<&[u8]>) -> Result<UsageReport, AnalyticsError> {
    let mut out = UsageReport::default();
    let mut users: BTreeMap<String, Acc> = BTreeMap::new();
    let mut histogram: BTreeMap<String, u64> = ACTION_NAMES.iter().map(|n| (n.to_string(), 0)).collect();
    let mut durations: Vec<u64> = Vec::new();

    // server hits, grouped by session id in file order
    let mut sessions: BTreeMap<String, Vec<HitRecord>> = BTreeMap::new();
    for (i, line) in lines(hitlog).enumerate() {
        match line.map_err(|_| None).and_then(|l| HitRecord::parse(l).map_err(Some)) {
            Ok(hit) if hit.node == REFUSED_NODE => out.refused_hits += 1,
            Ok(hit) => sessions.entry(hit.session_id.clone()).or_default().push(hit),
            Err(e) => {
                warn!(line = i + 1, error = ?e, "skipping malformed hit log line");
                out.skipped_lines.hitlog += 1;
            }
        }
    }
    for hits in sessions.values() {
        let acc = users.entry(hits[0].msisdn.clone()).or_default();
        let u = &mut acc.usage;
        u.ussd_sessions += 1;
        let duration = hits.last().expect("non-empty").ts.saturating_sub(hits[0].ts);
        u.session_seconds += duration;
        durations.push(duration);
        for (i, hit) in hits.iter().enumerate() {
            acc.days.insert(day(hit.ts));
            acc.ussd_days.insert(day(hit.ts));
            let input = hit.input.trim();
            if !input.is_empty() {
                u.ussd_inputs += 1;
            }
            if input == "99" {
                u.back_uses += 1;
            }
            if hit.node == "BusinessDetail" {
                u.detail_visits += 1;
            }
            let prev = if i > 0 { hits[i - 1].node.as_str() } else { "" };
            if prev == "TextInput" && !input.is_empty() && !RESERVED_INPUTS.contains(&input) {
                u.text_searches += 1;
            }
            if prev == "Welcome" && (hit.node == "SectorList" || hit.node == "DistrictList") {
                u.filter_searches += 1;
            }
        }
    }

    // client actions, per device, split on idle gaps
    let mut per_device: BTreeMap<String, Vec<ActionLine>> = BTreeMap::new();
    for (i, line) in lines(actions).enumerate() {
        match line.map_err(|_| None).and_then(|l| ActionLine::parse(l).map_err(Some)) {
            Ok(a) if histogram.contains_key(&a.action) => per_device.entry(a.msisdn.clone()).or_default().push(a),
            other => {
                warn!(line = i + 1, error = ?other.err(), "skipping malformed action line");
                out.skipped_lines.actions += 1;
            }
        }
    }
    for (msisdn, mut list) in per_device {
        list.sort_by_key(|a| a.ts);
        let acc = users.entry(msisdn).or_default();
        let u = &mut acc.usage;
        let mut session_start = list[0].ts;
        for (i, a) in list.iter().enumerate() {
            if i == 0 || a.ts - list[i - 1].ts > CLIENT_SESSION_GAP {
                if i > 0 {
                    let d = list[i - 1].ts - session_start;
                    u.session_seconds += d;
                    durations.push(d);
                }
                u.client_sessions += 1;
                session_start = a.ts;
            }
            acc.days.insert(day(a.ts));
            acc.client_days.insert(day(a.ts));
            u.client_actions += 1;
            *histogram.get_mut(&a.action).expect("checked above") += 1;
            match a.action.as_str() {
                "open_detail" => u.detail_visits += 1,
                "text_search" => u.text_searches += 1,
                "filter_search" => u.filter_searches += 1,
                _ => {}
            }
        }
        let d = list.last().expect("non-empty").ts - session_start;
        u.session_seconds += d;
        durations.push(d);
    }

    let mut platforms = Platforms::default();
    let (mut ussd_days, mut client_days) = (0, 0);
    for (msisdn, mut acc) in users {
        acc.usage.msisdn = msisdn;
        acc.usage.active_dates = acc.days.len() as u64;
        acc.usage.ussd_active_dates = acc.ussd_days.len() as u64;
        acc.usage.client_active_dates = acc.client_days.len() as u64;
        let u = acc.usage;
        if u.ussd_sessions > 0 {
            platforms.ussd.users += 1;
            platforms.ussd.sessions += u.ussd_sessions;
            platforms.ussd.events += u.ussd_inputs;
            ussd_days += u.ussd_active_dates;
        }
        if u.client_sessions > 0 {
            platforms.client.users += 1;
            platforms.client.sessions += u.client_sessions;
            platforms.client.events += u.client_actions;
            client_days += u.client_active_dates;
        }
        out.sessions.ussd += u.ussd_sessions;
        out.sessions.client += u.client_sessions;
        out.detail_visits.total += u.detail_visits;
        out.back_uses += u.back_uses;
        out.text_searches += u.text_searches;
        out.filter_searches += u.filter_searches;
        out.ussd_inputs += u.ussd_inputs;
        out.users.push(u);
    }
    for (p, days) in [(&mut platforms.ussd, ussd_days), (&mut platforms.client, client_days)] {
        p.events_per_user = mean(p.events, p.users);
        p.active_dates_per_user = mean(days, p.users);
    }
    let n = out.users.len() as u64;
    out.unique_users = n;
    out.sessions.total = out.sessions.ussd + out.sessions.client;
    out.sessions_per_user = mean(out.sessions.total, n);
    out.detail_visits.per_user_mean = mean(out.detail_visits.total, n);
    out.active_dates_per_user = mean(out.users.iter().map(|u| u.active_dates).sum(), n);
    out.session_duration_mean_secs = mean(durations.iter().sum(), durations.len() as u64);
    out.action_histogram = histogram;
    out.platforms = platforms;
    if let Some(table) = demographics {
        out.demographics = stratify(&out.users, table)?;
    }
    Ok(out)
}

fn stratify(
    users: &[UserUsage],
    table: &[u8],
) -> Result<BTreeMap<String, BTreeMap<String, GroupSummary>>, AnalyticsError> {
    let err = |m: String| AnalyticsError::Demographics(m);
    let mut reader = csv::Reader::from_reader(table);
    let headers = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    let key = headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case("msisdn"))
        .ok_or_else(|| err("no msisdn column".into()))?;
    let columns: Vec<(usize, String)> =
        headers.iter().enumerate().filter(|(i, _)| *i != key).map(|(i, h)| (i, h.trim().to_string())).collect();

    let mut rows: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let msisdn = normalize_msisdn(row.get(key).unwrap_or(""))
            .map_err(|e| err(format!("row {}: {e}", i + 2)))?;
        let values = columns.iter().map(|(c, _)| row.get(*c).unwrap_or("").trim().to_string()).collect();
        rows.insert(msisdn.to_string(), values);
    }

    let mut out = BTreeMap::new();
    for (ci, (_, name)) in columns.iter().enumerate() {
        let mut groups: BTreeMap<String, (u64, u64, u64, u64)> = BTreeMap::new();
        for u in users {
            let value = rows
                .get(&u.msisdn)
                .map(|v| v[ci].clone())
                .filter(|v| !v.is_empty())
                .unwrap_or_else(|| "unknown".to_string());
            let g = groups.entry(value).or_default();
            g.0 += 1;
            g.1 += u.ussd_sessions + u.client_sessions;
            g.2 += u.detail_visits;
            g.3 += u.active_dates;
        }
        let summaries = groups
            .into_iter()
            .map(|(v, (n, s, d, a))| {
                (v, GroupSummary { users: n, sessions_mean: mean(s, n), detail_visits_mean: mean(d, n), active_dates_mean: mean(a, n) })
            })
            .collect();
        out.insert(name.clone(), summaries);
    }
    Ok(out)
}
