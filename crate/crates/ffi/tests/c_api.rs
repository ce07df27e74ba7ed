use std::ffi::{CStr, CString};
use std::ptr;

use chemdyn_ffi::*;

fn last_error() -> String {
    let p = chemdyn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(chemdyn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn kinetic_elements_match_closed_form() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(chemdyn_kinetic_element(1.0, 1.0, 0, &mut v), ChemdynStatus::Ok);
        assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert_eq!(chemdyn_kinetic_element(1.0, 1.0, 1, &mut v), ChemdynStatus::Ok);
        assert!((v + 1.0).abs() < 1e-12);
        assert_eq!(chemdyn_kinetic_element(2.0, 0.5, 2, &mut v), ChemdynStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(
            chemdyn_kinetic_element(-1.0, 1.0, 0, &mut v),
            ChemdynStatus::InvalidArgument
        );
        assert_eq!(
            chemdyn_kinetic_element(1.0, 1.0, 0, ptr::null_mut()),
            ChemdynStatus::NullPointer
        );
    }
}

#[test]
fn grid_lifecycle_and_errors() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(chemdyn_grid_new(2, 4, -1.0, 1.0, 1.0, &mut g), ChemdynStatus::Ok);
        assert_eq!(chemdyn_grid_size(g), 16);
        let mut x = 0.0;
        assert_eq!(chemdyn_grid_coordinate(g, 1, 3, &mut x), ChemdynStatus::Ok);
        assert_eq!(x, 1.0);
        assert_eq!(chemdyn_grid_coordinate(g, 2, 0, &mut x), ChemdynStatus::InvalidArgument);
        chemdyn_grid_free(g);
        chemdyn_grid_free(ptr::null_mut());

        let mut bad = ptr::null_mut();
        assert_eq!(
            chemdyn_grid_new(1, 3, 0.0, 1.0, 1.0, &mut bad),
            ChemdynStatus::InvalidArgument
        );
        assert!(bad.is_null());
        assert!(last_error().contains('3'), "{}", last_error());
        assert_eq!(chemdyn_grid_size(ptr::null()), 0);
    }
}

#[test]
fn double_well_model_encoding_and_spectrum() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(
            chemdyn_model_new(ChemdynModelKind::DoubleWell, &mut m),
            ChemdynStatus::Ok
        );
        let dim = chemdyn_model_dim(m);
        assert_eq!(dim, 8);
        let mut h = vec![0.0; dim * dim];
        assert_eq!(
            chemdyn_model_hamiltonian(m, h.as_mut_ptr(), 3),
            ChemdynStatus::BufferTooSmall
        );
        assert_eq!(chemdyn_model_hamiltonian(m, h.as_mut_ptr(), h.len()), ChemdynStatus::Ok);
        for i in 0..dim {
            for j in 0..dim {
                assert_eq!(h[i * dim + j], h[j * dim + i]);
            }
        }

        let mut sum = ptr::null_mut();
        assert_eq!(chemdyn_model_encode(m, &mut sum), ChemdynStatus::Ok);
        assert_eq!(chemdyn_pauli_num_qubits(sum), 3);
        assert!(chemdyn_pauli_len(sum) > 0 && chemdyn_pauli_len(sum) <= 64);
        let mut need = 0usize;
        assert_eq!(
            chemdyn_pauli_to_text(sum, ptr::null_mut(), 0, &mut need),
            ChemdynStatus::BufferTooSmall
        );
        let mut buf = vec![0 as std::ffi::c_char; need];
        assert_eq!(
            chemdyn_pauli_to_text(sum, buf.as_mut_ptr(), need, &mut need),
            ChemdynStatus::Ok
        );
        let text = CStr::from_ptr(buf.as_ptr()).to_owned();
        let mut back = ptr::null_mut();
        assert_eq!(chemdyn_pauli_parse(text.as_ptr(), &mut back), ChemdynStatus::Ok);
        assert_eq!(chemdyn_pauli_len(back), chemdyn_pauli_len(sum));
        chemdyn_pauli_free(back);
        chemdyn_pauli_free(sum);

        let mut eig = ptr::null_mut();
        assert_eq!(chemdyn_eigensolve(m, 2, &mut eig), ChemdynStatus::Ok);
        let mut e = [0.0; 2];
        assert_eq!(chemdyn_eigenset_energies(eig, e.as_mut_ptr(), 2), ChemdynStatus::Ok);
        assert!(e[0] < e[1]);
        assert_eq!(
            chemdyn_eigensolve(m, 9, &mut ptr::null_mut()),
            ChemdynStatus::InvalidArgument
        );

        let mut traj = ptr::null_mut();
        assert_eq!(chemdyn_propagate_subspace(m, eig, 1.0, &mut traj), ChemdynStatus::Ok);
        let n = chemdyn_trajectory_len(traj);
        assert_eq!(n, 1501);
        assert_eq!(chemdyn_trajectory_states(traj), 2);
        let mut pops = vec![0.0; 2 * n];
        assert_eq!(
            chemdyn_trajectory_populations(traj, pops.as_mut_ptr(), pops.len()),
            ChemdynStatus::Ok
        );
        for row in pops.chunks(2) {
            assert!((row[0] + row[1] - 1.0).abs() < 1e-9);
        }
        chemdyn_trajectory_free(traj);
        chemdyn_eigenset_free(eig);
        chemdyn_model_free(m);
    }
}

#[test]
fn spectrum_of_pure_tone() {
    let w0 = 0.05;
    let t: Vec<f64> = (0..2000).map(|k| k as f64).collect();
    let d: Vec<f64> = t.iter().map(|t| (w0 * t).cos()).collect();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            chemdyn_spectrum_new(t.as_ptr(), d.as_ptr(), t.len(), w0, 1, &mut s),
            ChemdynStatus::Ok
        );
        let n = chemdyn_spectrum_len(s);
        let mut q = vec![0.0; n];
        let mut i = vec![0.0; n];
        assert_eq!(chemdyn_spectrum_orders(s, q.as_mut_ptr(), n), ChemdynStatus::Ok);
        assert_eq!(chemdyn_spectrum_intensity(s, i.as_mut_ptr(), n), ChemdynStatus::Ok);
        let k = (0..n).max_by(|a, b| i[*a].total_cmp(&i[*b])).unwrap();
        assert!((q[k] - 1.0).abs() < 0.05);
        chemdyn_spectrum_free(s);

        let bad_t = [0.0, 1.0, 3.0];
        assert_eq!(
            chemdyn_spectrum_new(bad_t.as_ptr(), d.as_ptr(), 3, w0, 1, &mut s),
            ChemdynStatus::InvalidArgument
        );
        assert!(last_error().contains("uniform"), "{}", last_error());
    }
}

#[test]
fn config_errors_surface_as_parse_status() {
    let text = CString::new("model = \"helium\"\n[eigen]\nlayerz = 1\n").unwrap();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(chemdyn_model_from_toml(text.as_ptr(), &mut m), ChemdynStatus::Parse);
        assert!(m.is_null());
        assert!(last_error().contains("layerz"));
        let ok = CString::new("model = \"helium\"\n").unwrap();
        assert_eq!(chemdyn_model_from_toml(ok.as_ptr(), &mut m), ChemdynStatus::Ok);
        assert_eq!(chemdyn_model_dim(m), 64);
        let mut field = 1.0;
        assert_eq!(chemdyn_model_field(m, 0.0, &mut field), ChemdynStatus::Ok);
        assert_eq!(field, 0.0);
        chemdyn_model_free(m);
        assert_eq!(chemdyn_model_from_toml(ptr::null(), &mut m), ChemdynStatus::NullPointer);
    }
}

#[test]
fn resource_estimate_struct() {
    let mut e = ChemdynResourceEstimate::default();
    unsafe {
        assert_eq!(
            chemdyn_estimate_circuits(1, 1, 2, ChemdynMethod::RealTimeVqa, &mut e),
            ChemdynStatus::Ok
        );
        assert_eq!((e.metric, e.f_kinetic, e.f_potential, e.total), (1, 4, 2, 7));
        assert_eq!(
            chemdyn_estimate_circuits(0, 1, 2, ChemdynMethod::RealTimeVqa, &mut e),
            ChemdynStatus::InvalidArgument
        );
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(
            chemdyn_kinetic_element(0.0, 1.0, 0, &mut v),
            ChemdynStatus::InvalidArgument
        );
    }
    let other = std::thread::spawn(|| chemdyn_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(last_error().contains("positive"));
}
