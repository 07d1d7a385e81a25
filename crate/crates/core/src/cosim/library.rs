use std::ffi::{c_char, c_int, c_void, CStr, CString};
use std::fs;
use std::path::Path;
use std::ptr;

use libloading::{Library, Symbol};
use tempfile::TempDir;

use super::{Backend, BackendError, CosimError, StepResult, StepStatus};
use crate::codegen::entry_points;
use crate::fmi_map::{parse_xml, FmiType, ModelDescription, Value};
use crate::package::{FmuArchive, PackageError, PlatformTuple};
use crate::time::RationalTime;

type Instance = *mut c_void;
type Status = c_int;

const FMI3_OK: Status = 0;
const FMI3_WARNING: Status = 1;
const FMI3_DISCARD: Status = 2;

type GetVersionFn = unsafe extern "C" fn() -> *const c_char;
type InstantiateFn = unsafe extern "C" fn(
    *const c_char,
    *const c_char,
    *const c_char,
    bool,
    bool,
    bool,
    bool,
    *const u32,
    usize,
    *mut c_void,
    *const c_void,
    *const c_void,
) -> Instance;
type EnterInitFn = unsafe extern "C" fn(Instance, bool, f64, f64, bool, f64) -> Status;
type InstanceFn = unsafe extern "C" fn(Instance) -> Status;
type DoStepFn = unsafe extern "C" fn(Instance, f64, f64, bool, *mut bool, *mut bool, *mut bool, *mut f64) -> Status;
type FreeFn = unsafe extern "C" fn(Instance);
type GetFn<T> = unsafe extern "C" fn(Instance, *const u32, usize, *mut T, usize) -> Status;
type SetFn<T> = unsafe extern "C" fn(Instance, *const u32, usize, *const T, usize) -> Status;
type GetBinaryFn = unsafe extern "C" fn(Instance, *const u32, usize, *mut usize, *mut *const u8, usize) -> Status;
type SetBinaryFn = unsafe extern "C" fn(Instance, *const u32, usize, *const usize, *const *const u8, usize) -> Status;

/// An FMU binary loaded from an archive for the host platform.
///
/// The shared library is extracted to a private temporary directory that
/// lives as long as the backend.
pub struct LibraryBackend {
    md: ModelDescription,
    instance: Instance,
    // Field order matters: the library must be unloaded before its directory is removed.
    library: Library,
    dir: TempDir,
}

// The instance pointer is only used through `&mut self`.
unsafe impl Send for LibraryBackend {}

fn check(status: Status, call: &str) -> Result<(), BackendError> {
    match status {
        FMI3_OK | FMI3_WARNING => Ok(()),
        other => Err(BackendError::new(format!("{call} returned status {other}"))),
    }
}

impl LibraryBackend {
    pub fn load(archive: &Path, platform: PlatformTuple) -> Result<Self, CosimError> {
        Self::from_archive(&FmuArchive::read(archive)?, platform)
    }

    pub fn from_archive(archive: &FmuArchive, platform: PlatformTuple) -> Result<Self, CosimError> {
        let md = parse_xml(&archive.model_description).map_err(PackageError::from)?;
        let binary = archive.binaries.get(&platform).ok_or(CosimError::MissingBinary(platform))?;
        let io = |e: std::io::Error| CosimError::Library(e.to_string());
        let dir = tempfile::tempdir().map_err(io)?;
        let lib_path = dir.path().join(format!("{}.{}", md.model_identifier, platform.extension()));
        fs::write(&lib_path, binary).map_err(io)?;
        let resources = dir.path().join("resources");
        fs::create_dir_all(&resources).map_err(io)?;
        for (name, bytes) in &archive.resources {
            let path = resources.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io)?;
            }
            fs::write(path, bytes).map_err(io)?;
        }
        // Loading runs the library's initializers; the archive is trusted input.
        let library = unsafe { Library::new(&lib_path) }.map_err(|e| CosimError::Library(e.to_string()))?;
        let missing: Vec<String> = entry_points(&md)
            .into_iter()
            .filter(|name| unsafe { library.get::<*const c_void>(name.as_bytes()) }.is_err())
            .collect();
        if !missing.is_empty() {
            return Err(CosimError::MissingSymbol { names: missing });
        }
        Ok(Self { md, instance: ptr::null_mut(), library, dir })
    }

    fn symbol<T>(&self, name: &str) -> Result<Symbol<'_, T>, BackendError> {
        unsafe { self.library.get::<T>(name.as_bytes()) }.map_err(|e| BackendError::new(e.to_string()))
    }

    fn live(&self) -> Result<Instance, BackendError> {
        if self.instance.is_null() {
            Err(BackendError::new("not instantiated"))
        } else {
            Ok(self.instance)
        }
    }

    /// Version string reported by the library.
    pub fn version(&self) -> Result<String, BackendError> {
        let f = self.symbol::<GetVersionFn>("fmi3GetVersion")?;
        let raw = unsafe { f() };
        if raw.is_null() {
            return Err(BackendError::new("fmi3GetVersion returned null"));
        }
        Ok(unsafe { CStr::from_ptr(raw) }.to_string_lossy().into_owned())
    }

    fn get_scalar<T: Copy + Default>(&self, name: &str, vr: u32) -> Result<T, BackendError> {
        let f = self.symbol::<GetFn<T>>(name)?;
        let mut value = T::default();
        check(unsafe { f(self.live()?, &vr, 1, &mut value, 1) }, name)?;
        Ok(value)
    }

    fn set_scalar<T: Copy>(&self, name: &str, vr: u32, value: T) -> Result<(), BackendError> {
        let f = self.symbol::<SetFn<T>>(name)?;
        check(unsafe { f(self.live()?, &vr, 1, &value, 1) }, name)
    }
}

impl Backend for LibraryBackend {
    fn model_description(&self) -> &ModelDescription {
        &self.md
    }

    fn instantiate(&mut self, instance_name: &str) -> Result<(), BackendError> {
        let f = self.symbol::<InstantiateFn>("fmi3InstantiateCoSimulation")?;
        let name = CString::new(instance_name).map_err(|e| BackendError::new(e.to_string()))?;
        let token = CString::new(self.md.instantiation_token.as_str()).map_err(|e| BackendError::new(e.to_string()))?;
        let resources = format!("{}/resources/", self.dir.path().display());
        let resources = CString::new(resources).map_err(|e| BackendError::new(e.to_string()))?;
        let instance = unsafe {
            f(
                name.as_ptr(),
                token.as_ptr(),
                resources.as_ptr(),
                false,
                false,
                false,
                true,
                ptr::null(),
                0,
                ptr::null_mut(),
                ptr::null(),
                ptr::null(),
            )
        };
        if instance.is_null() {
            return Err(BackendError::new("fmi3InstantiateCoSimulation returned null"));
        }
        self.instance = instance;
        Ok(())
    }

    fn enter_initialization_mode(&mut self, start_time: RationalTime) -> Result<(), BackendError> {
        let f = self.symbol::<EnterInitFn>("fmi3EnterInitializationMode")?;
        check(unsafe { f(self.live()?, false, 0.0, start_time.to_f64(), false, 0.0) }, "fmi3EnterInitializationMode")
    }

    fn exit_initialization_mode(&mut self) -> Result<(), BackendError> {
        let f = self.symbol::<InstanceFn>("fmi3ExitInitializationMode")?;
        check(unsafe { f(self.live()?) }, "fmi3ExitInitializationMode")
    }

    fn set(&mut self, vr: u32, value: &Value) -> Result<(), BackendError> {
        match value {
            Value::Bool(v) => self.set_scalar("fmi3SetBoolean", vr, *v),
            Value::Int8(v) => self.set_scalar("fmi3SetInt8", vr, *v),
            Value::UInt8(v) => self.set_scalar("fmi3SetUInt8", vr, *v),
            Value::Int16(v) => self.set_scalar("fmi3SetInt16", vr, *v),
            Value::UInt16(v) => self.set_scalar("fmi3SetUInt16", vr, *v),
            Value::Int32(v) => self.set_scalar("fmi3SetInt32", vr, *v),
            Value::UInt32(v) => self.set_scalar("fmi3SetUInt32", vr, *v),
            Value::Int64(v) => self.set_scalar("fmi3SetInt64", vr, *v),
            Value::UInt64(v) => self.set_scalar("fmi3SetUInt64", vr, *v),
            Value::Float32(v) => self.set_scalar("fmi3SetFloat32", vr, *v),
            Value::Float64(v) => self.set_scalar("fmi3SetFloat64", vr, *v),
            Value::Binary(bytes) => {
                let f = self.symbol::<SetBinaryFn>("fmi3SetBinary")?;
                let (size, data) = (bytes.len(), bytes.as_ptr());
                check(unsafe { f(self.live()?, &vr, 1, &size, &data, 1) }, "fmi3SetBinary")
            }
        }
    }

    fn get(&mut self, vr: u32) -> Result<Value, BackendError> {
        let var = self.md.by_value_reference(vr).ok_or_else(|| BackendError::new(format!("no value reference {vr}")))?;
        Ok(match var.fmi_type {
            FmiType::Bool => Value::Bool(self.get_scalar("fmi3GetBoolean", vr)?),
            FmiType::Int8 => Value::Int8(self.get_scalar("fmi3GetInt8", vr)?),
            FmiType::UInt8 => Value::UInt8(self.get_scalar("fmi3GetUInt8", vr)?),
            FmiType::Int16 => Value::Int16(self.get_scalar("fmi3GetInt16", vr)?),
            FmiType::UInt16 => Value::UInt16(self.get_scalar("fmi3GetUInt16", vr)?),
            FmiType::Int32 => Value::Int32(self.get_scalar("fmi3GetInt32", vr)?),
            FmiType::UInt32 => Value::UInt32(self.get_scalar("fmi3GetUInt32", vr)?),
            FmiType::Int64 => Value::Int64(self.get_scalar("fmi3GetInt64", vr)?),
            FmiType::UInt64 => Value::UInt64(self.get_scalar("fmi3GetUInt64", vr)?),
            FmiType::Float32 => Value::Float32(self.get_scalar("fmi3GetFloat32", vr)?),
            FmiType::Float64 => Value::Float64(self.get_scalar("fmi3GetFloat64", vr)?),
            FmiType::Binary { .. } => {
                let f = self.symbol::<GetBinaryFn>("fmi3GetBinary")?;
                let mut size = 0usize;
                let mut data: *const u8 = ptr::null();
                check(unsafe { f(self.live()?, &vr, 1, &mut size, &mut data, 1) }, "fmi3GetBinary")?;
                if data.is_null() {
                    Value::Binary(Vec::new())
                } else {
                    Value::Binary(unsafe { std::slice::from_raw_parts(data, size) }.to_vec())
                }
            }
        })
    }

    fn do_step(&mut self, current: RationalTime, step: RationalTime) -> Result<StepResult, BackendError> {
        let f = self.symbol::<DoStepFn>("fmi3DoStep")?;
        let (mut event, mut terminate, mut early) = (false, false, false);
        let mut last = 0.0f64;
        let status = unsafe {
            f(self.live()?, current.to_f64(), step.to_f64(), true, &mut event, &mut terminate, &mut early, &mut last)
        };
        let status = match status {
            FMI3_OK => StepStatus::Ok,
            FMI3_WARNING => StepStatus::Warning,
            FMI3_DISCARD => StepStatus::Discard,
            _ => StepStatus::Error,
        };
        if terminate {
            return Err(BackendError::new("FMU requested termination"));
        }
        if !early {
            return Ok(StepResult { status, early_return: false, last_successful_time: step });
        }
        let advanced = RationalTime::from_f64(last)
            .map_err(|_| BackendError::new(format!("invalid lastSuccessfulTime {last}")))?
            .min(step);
        Ok(StepResult { status, early_return: true, last_successful_time: advanced })
    }

    fn terminate(&mut self) -> Result<(), BackendError> {
        let f = self.symbol::<InstanceFn>("fmi3Terminate")?;
        check(unsafe { f(self.live()?) }, "fmi3Terminate")
    }
}

impl Drop for LibraryBackend {
    fn drop(&mut self) {
        if self.instance.is_null() {
            return;
        }
        if let Ok(f) = self.symbol::<FreeFn>("fmi3FreeInstance") {
            unsafe { f(self.instance) };
        }
        self.instance = ptr::null_mut();
    }
}
