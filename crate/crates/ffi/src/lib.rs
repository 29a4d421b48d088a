//! C ABI over the `indexcode` rate-region calculator.
//!
//! Instances and regions are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`IxStatus`]; on failure the message is available from
//! [`ix_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with [`ix_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use indexcode::builtin;
use indexcode::cli::{mutual_info, CliError};
use indexcode::composite::{achievable_region, max_weighted_rate, RegionOptions, Selection, SelectionMode};
use indexcode::model::file::{parse_instance, InstanceFile};
use indexcode::model::Instance;
use indexcode::polytope::{RateRegion, Variable};
use indexcode::rational::{self, Rational};

/// Result of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IxStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// Malformed or invalid input: instance text, names, vectors, options.
    InvalidInput = 3,
    /// The request exceeds a resource cap, such as the selection count.
    ResourceCap = 4,
    /// An internal panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IxSelection {
    /// The instance's own selection block.
    Paper = 0,
    /// Union over every admissible selection.
    All = 1,
}

/// Opaque parsed instance.
pub struct IxInstance {
    file: InstanceFile,
}

/// Opaque computed region together with its instance.
pub struct IxRegion {
    instance: Instance,
    region: RateRegion,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: IxStatus,
    message: String,
}

impl Failure {
    fn new(status: IxStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Input(_) => IxStatus::InvalidInput,
            CliError::ResourceCap(_) => IxStatus::ResourceCap,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `body` behind the panic boundary and translates its outcome.
fn guarded(body: impl FnOnce() -> Result<(), Failure>) -> IxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IxStatus::Ok,
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(_) => {
            set_last_error("internal error");
            IxStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(IxStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(IxStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(IxStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(IxStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn parse_vector(instance: &Instance, s: &str, what: &str) -> Result<BTreeMap<Variable, Rational>, Failure> {
    let ids = instance.reported_messages();
    let values = s
        .split(',')
        .map(|t| rational::parse(t).map_err(|e| Failure::new(IxStatus::InvalidInput, format!("{what}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != ids.len() {
        return Err(Failure::new(
            IxStatus::InvalidInput,
            format!("{what}: expected {} values, got {}", ids.len(), values.len()),
        ));
    }
    Ok(ids.into_iter().map(Variable::rate).zip(values).collect())
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ix_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ix_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance document (JSON text).
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_instance_from_json(json: *const c_char, out: *mut *mut IxInstance) -> IxStatus {
    guarded(|| {
        let file = parse_instance(text(json, "json")?).map_err(|e| Failure::new(IxStatus::InvalidInput, e.to_string()))?;
        put(out, Box::into_raw(Box::new(IxInstance { file })), "out")
    })
}

/// Loads a bundled example by name, such as `dist-14-123`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_instance_builtin(name: *const c_char, out: *mut *mut IxInstance) -> IxStatus {
    guarded(|| {
        let file = builtin::builtin_instance(text(name, "name")?).map_err(CliError::from)?;
        put(out, Box::into_raw(Box::new(IxInstance { file })), "out")
    })
}

/// Number of messages of the instance, 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ix_instance_message_count(instance: *const IxInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.file.instance.message_count())
}

/// # Safety
/// `instance` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ix_instance_free(instance: *mut IxInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Computes the achievable region. `precision_bits` sets the dyadic floor of
/// the MAC information values (1 to 64; 24 is the CLI default). `workers` of
/// 0 uses the default thread pool.
///
/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_region_compute(
    instance: *const IxInstance,
    selection: IxSelection,
    precision_bits: u32,
    workers: usize,
    out: *mut *mut IxRegion,
) -> IxStatus {
    guarded(|| {
        let file = &handle(instance, "instance")?.file;
        if !(1..=64).contains(&precision_bits) {
            return Err(Failure::new(IxStatus::InvalidInput, "precision_bits must be in 1..=64"));
        }
        let mode = match (selection, &file.selection) {
            (IxSelection::All, _) => SelectionMode::All,
            (IxSelection::Paper, Some(doc)) => {
                SelectionMode::Paper(Selection::from_doc(&file.instance, doc).map_err(CliError::from)?)
            }
            (IxSelection::Paper, None) => {
                return Err(Failure::new(IxStatus::InvalidInput, "the instance has no selection block"))
            }
        };
        let mi = mutual_info(&file.instance, precision_bits)?;
        let options = RegionOptions {
            workers: (workers > 0).then_some(workers),
            ..RegionOptions::default()
        };
        let region = achievable_region(&file.instance, &mi, &mode, &options).map_err(CliError::from)?;
        let handle = IxRegion {
            instance: file.instance.clone(),
            region,
        };
        put(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Number of polyhedra in the union, 0 for a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ix_region_polyhedron_count(region: *const IxRegion) -> usize {
    region.as_ref().map_or(0, |r| r.region.members().len())
}

/// Canonical inequalities of one polyhedron, one per line, bounds exact.
///
/// # Safety
/// `region` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_region_render(region: *const IxRegion, index: usize, out: *mut *mut c_char) -> IxStatus {
    guarded(|| {
        let r = handle(region, "region")?;
        let member = r.region.members().get(index).ok_or_else(|| {
            Failure::new(
                IxStatus::InvalidInput,
                format!("polyhedron {index} out of range ({} polyhedra)", r.region.members().len()),
            )
        })?;
        let mut s = String::new();
        for line in member.polyhedron.render_lines() {
            s.push_str(&line);
            s.push('\n');
        }
        put(out, owned_string(s), "out")
    })
}

/// Largest weighted sum-rate. `weights` is `w1,...,wN` with one nonnegative
/// rational per message; the exact value is written as a string like `5/2`.
///
/// # Safety
/// `region` must be a live handle, `weights` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_region_max_weighted_rate(
    region: *const IxRegion,
    weights: *const c_char,
    out: *mut *mut c_char,
) -> IxStatus {
    guarded(|| {
        let r = handle(region, "region")?;
        let w = parse_vector(&r.instance, text(weights, "weights")?, "weights")?;
        if w.values().any(|x| *x < rational::int(0)) {
            return Err(Failure::new(IxStatus::InvalidInput, "weights must be nonnegative"));
        }
        let value = max_weighted_rate(&r.region, &w).map_err(CliError::from)?;
        put(out, owned_string(rational::render(&value)), "out")
    })
}

/// Whether the rate point `r1,...,rN` lies in the region.
///
/// # Safety
/// `region` must be a live handle, `rates` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ix_region_contains(region: *const IxRegion, rates: *const c_char, out: *mut bool) -> IxStatus {
    guarded(|| {
        let r = handle(region, "region")?;
        let point = parse_vector(&r.instance, text(rates, "rates")?, "rates")?;
        put(out, r.region.contains_point(&point), "out")
    })
}

/// # Safety
/// `region` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ix_region_free(region: *mut IxRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}
